/**
 * @file gaugeforge.hpp
 * @brief Umbrella header.
 */
#pragma once

#include <gaugeforge/jet.hpp>
#include <gaugeforge/linalg.hpp>
#include <gaugeforge/expr.hpp>
#include <gaugeforge/sampling.hpp>
#include <gaugeforge/multiform.hpp>
#include <gaugeforge/connection.hpp>
#include <gaugeforge/distortion.hpp>
#include <gaugeforge/gauge.hpp>
#include <gaugeforge/stress_forms.hpp>
#include <gaugeforge/spec.hpp>
#include <gaugeforge/report.hpp>

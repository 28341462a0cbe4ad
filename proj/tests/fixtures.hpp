// Small metric builders shared by the test suites.
#pragma once

#include <gaugeforge/connection.hpp>

#include <cmath>
#include <memory>
#include <string>

namespace fixture {

using namespace gaugeforge;

inline std::shared_ptr<CoordinateChart> spherical_chart(double rmin = 4.0, double rmax = 100.0) {
    auto c = std::make_shared<CoordinateChart>(std::array<std::string, 4>{"t", "r", "theta", "phi"},
                                               std::array<CoordinateChart::Interval, 4>{
                                                   {{-10.0, 10.0}, {rmin, rmax}, {0.2, std::acos(-1.0) - 0.2}, {0.0, 6.2}}});
    return c;
}

inline MetricField diag_metric(std::shared_ptr<const CoordinateChart> chart, const std::array<std::string, 4>& d,
                               const ConstantMap& k = {}) {
    ExprGrid g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g[i][j] = i == j ? d[i] : (j > i ? "0" : "");
    return MetricField::parse(std::move(chart), g, k);
}

inline MetricField flat_spherical(std::shared_ptr<const CoordinateChart> c) {
    return diag_metric(std::move(c), {"1", "-1", "-r^2", "-r^2*sin(theta)^2"});
}

inline MetricField schwarzschild(std::shared_ptr<const CoordinateChart> c, double m = 1.0) {
    return diag_metric(std::move(c), {"1-2*m/r", "-1/(1-2*m/r)", "-r^2", "-r^2*sin(theta)^2"}, {{"m", m}});
}

inline MetricField logunov(std::shared_ptr<const CoordinateChart> c, double lambda, double m = 1.0) {
    return diag_metric(std::move(c),
                       {"(r+lambda-m)/(r+lambda+m)", "-(r+lambda+m)/(r+lambda-m)", "-(r+lambda+m)^2",
                        "-(r+lambda+m)^2*sin(theta)^2"},
                       {{"m", m}, {"lambda", lambda}});
}

inline MetricField minkowski_cartesian(std::shared_ptr<const CoordinateChart> c) {
    return diag_metric(std::move(c), {"1", "-1", "-1", "-1"});
}

}  // namespace fixture

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icf/cfraction_fit.hpp"
#include "icf/integral_fraction.hpp"

namespace icf {

inline nlohmann::json cfraction_to_json(const InterpCFraction& m) {
    return nlohmann::json{{"nodes", m.nodes},
                          {"coefficients", m.coefficients}};
}

inline InterpCFraction cfraction_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("coefficients"))
        throw ValidationError(
            "model document needs 'nodes' and 'coefficients' arrays");
    InterpCFraction m;
    try {
        m.nodes = j.at("nodes").get<std::vector<double>>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model document: ") +
                              e.what());
    }
    detail::check_model(m);
    return m;
}

/// Kernel table: header `xi,a1,...,an`, one row per grid point.
inline void write_kernel_csv(const KernelSet& ks, std::ostream& os) {
    os << "xi";
    for (int i = 1; i <= ks.floor_count(); ++i) os << ",a" << i;
    os << '\n';
    const GridFunction& first = ks.kernels.front();
    for (int j = 0; j <= ks.cells(); ++j) {
        os << expr::format_number(first.z(j));
        for (const GridFunction& kernel : ks.kernels)
            os << ',' << expr::format_number(kernel[j]);
        os << '\n';
    }
}

inline nlohmann::json kernel_sidecar_json(const KernelSet& ks) {
    return nlohmann::json{
        {"a0", ks.a0}, {"n", ks.floor_count()}, {"grid", ks.cells()}};
}

/// Plot-ready table: kernel columns plus one residual column per node level.
inline void write_report_csv(const KernelSet& ks,
                             const InterpolationReport& rep,
                             std::ostream& os) {
    os << "xi";
    for (int i = 1; i <= ks.floor_count(); ++i) os << ",a" << i;
    for (int k = 0; k <= rep.floor_count; ++k) os << ",res" << k;
    os << '\n';
    const GridFunction& first = ks.kernels.front();
    for (int j = 0; j <= ks.cells(); ++j) {
        os << expr::format_number(first.z(j));
        for (const GridFunction& kernel : ks.kernels)
            os << ',' << expr::format_number(kernel[j]);
        for (int k = 0; k <= rep.floor_count; ++k)
            os << ','
               << expr::format_number(
                      rep.residuals[static_cast<std::size_t>(k)]
                                   [static_cast<std::size_t>(j)]);
        os << '\n';
    }
}

}  // namespace icf

#ifndef ICEDEM_PRESETS_HPP
#define ICEDEM_PRESETS_HPP

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "icedem/rheology.hpp"

namespace icedem {

/// Built-in Burgers parameter sets for polycrystalline ice, calibrated from
/// fast-sintering creep measurements. Values are stored exactly as fitted;
/// scenario configs declare any unit scale applied on top of them. Each set
/// is valid at its own temperature (T_ref is set accordingly).
struct IcePreset {
    double temperature_celsius;
    BurgersParams params;
};

inline const std::vector<IcePreset>& ice_presets() {
    static const std::vector<IcePreset> presets = {
        //     degC        k_i     k_d        c_i          c_d     f0_b     T_ref
        {-1.0, {9.0e3, 0.30783, 0.15385e+03, 15.698, 0.08411, 272.15}},
        {-5.0, {9.0e3, 0.53908, 0.39047e+03, 43.230, 0.06535, 268.15}},
        {-12.0, {9.0e3, 0.60423, 0.70373e+03, 81.653, 0.05, 261.15}},
        {-23.0, {9.0e3, 1.1561, 1.0444e+03, 82.50, 0.0298, 250.15}},
    };
    return presets;
}

/// Preset lookup by temperature in Celsius (exact match on the fitted sets).
inline std::optional<BurgersParams> ice_preset(double celsius) {
    for (const auto& p : ice_presets())
        if (p.temperature_celsius == celsius) return p.params;
    return std::nullopt;
}

/// Preset lookup by name, e.g. "ice_-5C".
inline std::optional<BurgersParams> ice_preset(const std::string& name) {
    for (const auto& p : ice_presets()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "ice_%gC", p.temperature_celsius);
        if (name == buf) return p.params;
    }
    return std::nullopt;
}

}  // namespace icedem

#endif  // ICEDEM_PRESETS_HPP

#pragma once

// Strict JSON (de)serialization for the domain types. Every object is checked
// against its allowed key set so config typos fail loudly instead of silently
// falling back to defaults.

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "svolterra/grid.hpp"
#include "svolterra/kernels.hpp"
#include "svolterra/model.hpp"

namespace svolterra::io {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const char* where) {
    if (!j.is_object())
        throw std::invalid_argument(std::string(where) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok)
            throw std::invalid_argument(std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

inline const json& field(const json& j, const char* key, const char* where) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string(where) + ": missing key '" + key + "'");
    return j.at(key);
}

inline double number_field(const json& j, const char* key, const char* where) {
    const json& v = field(j, key, where);
    if (!v.is_number())
        throw std::invalid_argument(std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

inline double number_or(const json& j, const char* key, double dflt, const char* where) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number())
        throw std::invalid_argument(std::string(where) + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::string string_field(const json& j, const char* key, const char* where) {
    const json& v = field(j, key, where);
    if (!v.is_string())
        throw std::invalid_argument(std::string(where) + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

// Complex values are a plain number or an [re, im] pair.
inline std::complex<double> complex_from_json(const json& j, const char* where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument(std::string(where) + ": expected a number or [re, im]");
}

inline json complex_to_json(std::complex<double> z) {
    if (z.imag() == 0.0) return json(z.real());
    return json::array({z.real(), z.imag()});
}

inline std::vector<double> number_array(const json& j, const char* where) {
    if (!j.is_array()) throw std::invalid_argument(std::string(where) + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number())
            throw std::invalid_argument(std::string(where) + ": expected numeric entries");
        out.push_back(v.get<double>());
    }
    return out;
}

// -------------------------------------------------------------------- kernel

// {"type": "fractional"|"gamma"|"constant"|"expsum"|"shifted"|"expsum_approx", ...}.
// expsum_approx is a construction rule, not a family: it deserializes to the
// fitted ExpSum and therefore serializes back as one.
inline KernelSpec kernel_from_json(const json& j) {
    const std::string type = string_field(j, "type", "kernel");
    if (type == "fractional") {
        check_keys(j, {"type", "H"}, "kernel(fractional)");
        return kernel_fractional(number_field(j, "H", "kernel(fractional)"));
    }
    if (type == "gamma") {
        check_keys(j, {"type", "H", "eta"}, "kernel(gamma)");
        return kernel_gamma(number_field(j, "H", "kernel(gamma)"),
                            number_field(j, "eta", "kernel(gamma)"));
    }
    if (type == "constant") {
        check_keys(j, {"type", "value"}, "kernel(constant)");
        return kernel_constant(number_field(j, "value", "kernel(constant)"));
    }
    if (type == "expsum") {
        check_keys(j, {"type", "terms"}, "kernel(expsum)");
        const json& terms = field(j, "terms", "kernel(expsum)");
        if (!terms.is_array() || terms.empty())
            throw std::invalid_argument("kernel(expsum): 'terms' must be a non-empty array");
        std::vector<ExpSumTerm> ts;
        for (const auto& t : terms) {
            check_keys(t, {"weight", "rate"}, "kernel(expsum) term");
            ts.push_back({number_field(t, "weight", "expsum term"),
                          number_field(t, "rate", "expsum term")});
        }
        return kernel_expsum(std::move(ts));
    }
    if (type == "shifted") {
        check_keys(j, {"type", "base", "h"}, "kernel(shifted)");
        return kernel_shifted(kernel_from_json(field(j, "base", "kernel(shifted)")),
                              number_field(j, "h", "kernel(shifted)"));
    }
    if (type == "expsum_approx") {
        check_keys(j, {"type", "target", "n", "eta0", "eta1"}, "kernel(expsum_approx)");
        const json& n = field(j, "n", "kernel(expsum_approx)");
        if (!n.is_number_integer() || n.get<int>() < 1)
            throw std::invalid_argument("kernel(expsum_approx): 'n' must be a positive integer");
        return expsum_approx(kernel_from_json(field(j, "target", "kernel(expsum_approx)")),
                             n.get<int>(), number_field(j, "eta0", "kernel(expsum_approx)"),
                             number_field(j, "eta1", "kernel(expsum_approx)"));
    }
    throw std::invalid_argument("kernel: unknown type '" + type + "'");
}

inline json kernel_to_json(const KernelSpec& k) {
    struct V {
        json operator()(const Fractional& f) const {
            return {{"type", "fractional"}, {"H", f.H}};
        }
        json operator()(const Gamma& g) const {
            return {{"type", "gamma"}, {"H", g.H}, {"eta", g.eta}};
        }
        json operator()(const Constant& c) const {
            return {{"type", "constant"}, {"value", c.value}};
        }
        json operator()(const ExpSum& e) const {
            json terms = json::array();
            for (const auto& t : e.terms)
                terms.push_back({{"weight", t.weight}, {"rate", t.rate}});
            return {{"type", "expsum"}, {"terms", std::move(terms)}};
        }
        json operator()(const Shifted& s) const {
            return {{"type", "shifted"}, {"base", kernel_to_json(*s.base)}, {"h", s.h}};
        }
    };
    return std::visit(V{}, k.v);
}

// --------------------------------------------------------------------- jumps

inline JumpMeasure jumps_from_json(const json& j) {
    const std::string type = string_field(j, "type", "nu");
    if (type == "none") {
        check_keys(j, {"type"}, "nu(none)");
        return JumpMeasure{JumpNone{}};
    }
    if (type == "atoms") {
        check_keys(j, {"type", "atoms"}, "nu(atoms)");
        const json& atoms = field(j, "atoms", "nu(atoms)");
        if (!atoms.is_array() || atoms.empty())
            throw std::invalid_argument("nu(atoms): 'atoms' must be a non-empty array");
        std::vector<JumpAtom> as;
        for (const auto& a : atoms) {
            check_keys(a, {"zeta", "mass"}, "nu(atoms) entry");
            as.push_back({number_field(a, "zeta", "atom"), number_field(a, "mass", "atom")});
        }
        return jump_atoms(std::move(as));
    }
    if (type == "exponential") {
        check_keys(j, {"type", "m", "rho"}, "nu(exponential)");
        return jump_exponential(number_field(j, "m", "nu(exponential)"),
                                number_field(j, "rho", "nu(exponential)"));
    }
    throw std::invalid_argument("nu: unknown type '" + type + "'");
}

inline json jumps_to_json(const JumpMeasure& nu) {
    struct V {
        json operator()(const JumpNone&) const { return {{"type", "none"}}; }
        json operator()(const JumpAtoms& a) const {
            json atoms = json::array();
            for (const auto& at : a.atoms) atoms.push_back({{"zeta", at.zeta}, {"mass", at.mass}});
            return {{"type", "atoms"}, {"atoms", std::move(atoms)}};
        }
        json operator()(const JumpExponential& e) const {
            return {{"type", "exponential"}, {"m", e.m}, {"rho", e.rho}};
        }
    };
    return std::visit(V{}, nu.v);
}

// ------------------------------------------------------------------- triplet

inline AffineTriplet triplet_from_json(const json& j) {
    check_keys(j, {"b", "c", "nu"}, "triplet");
    AffineTriplet t;
    t.b = number_or(j, "b", 0.0, "triplet");
    t.c = number_or(j, "c", 0.0, "triplet");
    if (j.contains("nu")) t.nu = jumps_from_json(j.at("nu"));
    validate(t);
    return t;
}

inline json triplet_to_json(const AffineTriplet& t) {
    return {{"b", t.b}, {"c", t.c}, {"nu", jumps_to_json(t.nu)}};
}

// --------------------------------------------------------------------- curve

inline InputCurve curve_from_json(const json& j) {
    const std::string type = string_field(j, "type", "g0");
    if (type == "affine_in_k") {
        check_keys(j, {"type", "x0", "theta"}, "g0(affine_in_k)");
        return curve_affine_in_k(number_or(j, "x0", 0.0, "g0"), number_or(j, "theta", 0.0, "g0"));
    }
    if (type == "table") {
        check_keys(j, {"type", "t", "g"}, "g0(table)");
        return curve_table(number_array(field(j, "t", "g0(table)"), "g0.t"),
                           number_array(field(j, "g", "g0(table)"), "g0.g"));
    }
    throw std::invalid_argument("g0: unknown type '" + type + "'");
}

inline json curve_to_json(const InputCurve& c) {
    if (const auto* a = std::get_if<AffineInK>(&c.v))
        return {{"type", "affine_in_k"}, {"x0", a->x0}, {"theta", a->theta}};
    const auto& tab = std::get<NonDecreasingTable>(c.v);
    return {{"type", "table"}, {"t", tab.t}, {"g", tab.g}};
}

// ---------------------------------------------------------------------- grid

inline Grid grid_from_json(const json& j) {
    check_keys(j, {"horizon", "steps"}, "grid");
    const json& steps = field(j, "steps", "grid");
    if (!steps.is_number_integer() || steps.get<int>() < 1)
        throw std::invalid_argument("grid: 'steps' must be a positive integer");
    Grid g{number_field(j, "horizon", "grid"), steps.get<int>()};
    if (!(g.horizon > 0.0)) throw std::invalid_argument("grid: 'horizon' must be > 0");
    return g;
}

inline json grid_to_json(const Grid& g) {
    return {{"horizon", g.horizon}, {"steps", g.steps}};
}

}  // namespace svolterra::io

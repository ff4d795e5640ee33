#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mec/coupling.hpp"
#include "mec/distribution.hpp"
#include "mec/entropy.hpp"
#include "mec/enumerate.hpp"
#include "mec/errors.hpp"

namespace mec {

using json = nlohmann::json;

/// A solve/extremes/kappa problem: marginals as exact literals plus the
/// entropy functional and run options.
struct Problem {
    std::vector<Distribution> marginals;
    EntropyFunctional entropy = Shannon{};
    double tie_tol = 1e-9;
    EnumerateOptions options;
};

inline EntropyFunctional entropy_from_json(const json& j) {
    const std::string kind = j.value("kind", "shannon");
    const double base = j.value("base", 2.0);
    if (kind == "shannon") {
        if (base <= 1.0) throw ShapeMismatch("shannon base must be > 1");
        return Shannon{base};
    }
    if (kind == "renyi") {
        if (!j.contains("alpha")) throw ShapeMismatch("renyi entropy needs alpha");
        return Renyi{j.at("alpha").get<double>(), base};
    }
    if (kind == "tsallis") {
        if (!j.contains("alpha")) throw ShapeMismatch("tsallis entropy needs alpha");
        return Tsallis{j.at("alpha").get<double>()};
    }
    throw ShapeMismatch("entropy kind must be shannon, renyi or tsallis, got '" + kind + "'");
}

inline json entropy_to_json(const EntropyFunctional& f) {
    json j;
    if (const auto* s = std::get_if<Shannon>(&f)) {
        j["kind"] = "shannon";
        j["base"] = s->base;
    } else if (const auto* r = std::get_if<Renyi>(&f)) {
        j["kind"] = "renyi";
        j["alpha"] = r->alpha;
        j["base"] = r->base;
    } else if (const auto* t = std::get_if<Tsallis>(&f)) {
        j["kind"] = "tsallis";
        j["alpha"] = t->alpha;
    } else {
        j["kind"] = "phi-h";
    }
    return j;
}

inline std::vector<Distribution> marginals_from_json(const json& j) {
    if (!j.is_array() || j.size() < 2)
        throw ShapeMismatch("'marginals' must list at least two vectors");
    std::vector<Distribution> out;
    for (std::size_t t = 0; t < j.size(); ++t) {
        std::vector<std::string> texts;
        for (const auto& e : j[t])
            texts.push_back(e.is_string() ? e.get<std::string>() : e.dump());
        try {
            out.push_back(Distribution::parse(texts));
        } catch (const Error& err) {
            throw Error("marginal " + std::to_string(t + 1) + ": " + err.what());
        }
    }
    return out;
}

inline Problem problem_from_json(const json& j) {
    Problem p;
    p.marginals = marginals_from_json(j.at("marginals"));
    if (j.contains("entropy")) p.entropy = entropy_from_json(j.at("entropy"));
    if (j.contains("options")) {
        const json& o = j.at("options");
        p.tie_tol = o.value("tie_tol", p.tie_tol);
        p.options.prefilter = o.value("prefilter", p.options.prefilter);
        p.options.threads = o.value("threads", p.options.threads);
        p.options.budget = o.value("budget", p.options.budget);
    }
    return p;
}

inline json distribution_to_json(const Distribution& d) {
    json a = json::array();
    for (const auto& w : d) a.push_back(w.fraction_str());
    return a;
}

/// Serializes a coupling as its support cells with exact fraction values
/// (plus float conveniences); zero cells are implied.
inline json coupling_to_json(const Coupling& c) {
    json j;
    j["dims"] = c.dims();
    json marg = json::array();
    for (const auto& m : c.marginals()) marg.push_back(distribution_to_json(m));
    j["marginals"] = std::move(marg);
    json cells = json::array();
    for (std::int64_t i = 1; i <= static_cast<std::int64_t>(c.flat().size()); ++i) {
        const Rational& v = c.at_linear(i);
        if (v.sign() == 0) continue;
        json cell;
        cell["cell"] = delinearize(i, c.dims());
        cell["value"] = v.fraction_str();
        cell["value_float"] = v.to_double();
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    return j;
}

inline Coupling coupling_from_json(const json& j) {
    const std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    const std::vector<Distribution> marginals = marginals_from_json(j.at("marginals"));
    std::vector<std::pair<std::int64_t, Rational>> cells;
    for (const auto& e : j.at("cells")) {
        const Cell cell = e.at("cell").get<Cell>();
        cells.emplace_back(linearize(cell, dims),
                           Rational::parse(e.at("value").get<std::string>()));
    }
    return Coupling::from_cells(dims, cells, marginals);
}

/// Coupling file loaded without the marginal-consistency validation, so
/// that a verifier can report exact defects instead of failing to parse.
struct RawCoupling {
    std::vector<int> dims;
    std::vector<Rational> values; // dense, row-major
    std::vector<Distribution> declared_marginals;
};

inline RawCoupling raw_coupling_from_json(const json& j) {
    RawCoupling raw;
    raw.dims = j.at("dims").get<std::vector<int>>();
    if (raw.dims.size() < 2) throw ShapeMismatch("coupling needs d >= 2 axes");
    for (int m : raw.dims)
        if (m < 2) throw ShapeMismatch("every axis needs size >= 2");
    raw.declared_marginals = marginals_from_json(j.at("marginals"));
    if (raw.declared_marginals.size() != raw.dims.size())
        throw ShapeMismatch("marginal count does not match axis count");
    raw.values.assign(cell_count(raw.dims), Rational(0));
    for (const auto& e : j.at("cells")) {
        const Cell cell = e.at("cell").get<Cell>();
        raw.values[linearize(cell, raw.dims) - 1] +=
            Rational::parse(e.at("value").get<std::string>());
    }
    return raw;
}

} // namespace mec

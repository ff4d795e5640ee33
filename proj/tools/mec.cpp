// mec: exact enumeration of coupling-polytope extreme points and
// minimum-entropy coupling solver. JSON in, JSON out.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mec/io.hpp"
#include "mec/local_opt.hpp"
#include "mec/mec.hpp"

namespace {

using mec::json;
using Clock = std::chrono::steady_clock;

struct CommonFlags {
    std::string entropy_kind;
    std::optional<double> alpha;
    std::optional<double> base;
    std::optional<double> tie_tol;
    bool no_prefilter = false;
    std::optional<int> threads;
    std::optional<std::uint64_t> budget;
    std::string out_path;
    bool timings = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--entropy", f.entropy_kind, "entropy kind: shannon, renyi or tsallis");
    cmd->add_option("--alpha", f.alpha, "alpha for renyi/tsallis");
    cmd->add_option("--base", f.base, "logarithm base (default 2)");
    cmd->add_option("--tie-tol", f.tie_tol, "absolute tie tolerance for minimizers");
    cmd->add_flag("--no-prefilter", f.no_prefilter, "scan every subset without the tree prefilter");
    cmd->add_option("--threads", f.threads, "worker threads for the subset scan");
    cmd->add_option("--budget", f.budget, "max candidate ranks to scan");
    cmd->add_option("-o,--out", f.out_path, "write the JSON result here instead of stdout");
    cmd->add_flag("--timings", f.timings, "include wall-clock timings in the result");
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mec::Error("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

mec::Problem load_problem(const std::string& path, const CommonFlags& f) {
    mec::Problem p = mec::problem_from_json(load_json(path));
    if (!f.entropy_kind.empty()) {
        json e;
        e["kind"] = f.entropy_kind;
        if (f.alpha) e["alpha"] = *f.alpha;
        if (f.base) e["base"] = *f.base;
        p.entropy = mec::entropy_from_json(e);
    } else if (f.alpha || f.base) {
        json e = mec::entropy_to_json(p.entropy);
        if (f.alpha) e["alpha"] = *f.alpha;
        if (f.base) e["base"] = *f.base;
        p.entropy = mec::entropy_from_json(e);
    }
    if (f.tie_tol) p.tie_tol = *f.tie_tol;
    if (f.no_prefilter) p.options.prefilter = false;
    if (f.threads) p.options.threads = *f.threads;
    if (f.budget) p.options.budget = *f.budget;
    return p;
}

void emit(const json& j, const CommonFlags& f) {
    if (f.out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(f.out_path);
        if (!out) throw mec::Error("cannot write '" + f.out_path + "'");
        out << j.dump(2) << "\n";
    }
}

json problem_header(const mec::Problem& p, const mec::ExtremePointSet& e) {
    json j;
    j["dims"] = e.dims();
    json marg = json::array();
    for (const auto& m : p.marginals) marg.push_back(mec::distribution_to_json(m));
    j["marginals"] = std::move(marg);
    j["entropy"] = mec::entropy_to_json(p.entropy);
    j["subsets_scanned"] = e.counts().scanned;
    j["nonsingular"] = e.counts().nonsingular;
    j["feasible"] = e.counts().feasible;
    j["extreme_point_count"] = e.size();
    return j;
}

std::optional<int> kappa_if_small(const mec::Problem& p) {
    if (p.marginals.size() != 2) return std::nullopt;
    try {
        return mec::kappa(p.marginals[0], p.marginals[1]);
    } catch (const mec::TooLarge&) {
        return std::nullopt;
    }
}

int cmd_solve(const std::string& path, const CommonFlags& f) {
    const mec::Problem p = load_problem(path, f);
    const auto t0 = Clock::now();
    const mec::ExtremePointSet e = mec::enumerate_extremes(p.marginals, p.options);
    const auto t1 = Clock::now();
    const mec::MinimizationReport rep = mec::min_entropy(p.entropy, e, p.tie_tol);
    const auto t2 = Clock::now();

    json j = problem_header(p, e);
    if (const auto k = kappa_if_small(p)) j["kappa"] = *k;
    j["min_entropy"] = rep.minimum;
    j["exact_profile_tie"] = rep.exact_profile_tie;
    json mins = json::array();
    for (const std::size_t idx : rep.minimizer_indices) {
        json m = mec::coupling_to_json(e.coupling_at(idx));
        m["witness_ranks"] = e.points()[idx].witness_ranks;
        m["entropy"] = rep.values[idx];
        mins.push_back(std::move(m));
    }
    j["minimizers"] = std::move(mins);
    if (f.timings) {
        j["timings"] = {
            {"enumerate_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
            {"minimize_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(t2 - t1).count()}};
    }
    emit(j, f);
    return 0;
}

int cmd_extremes(const std::string& path, const CommonFlags& f) {
    const mec::Problem p = load_problem(path, f);
    const auto t0 = Clock::now();
    const mec::ExtremePointSet e = mec::enumerate_extremes(p.marginals, p.options);
    const auto t1 = Clock::now();

    json j = problem_header(p, e);
    json points = json::array();
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto& pt = e.points()[k];
        json entry;
        json cells = json::array();
        for (std::int64_t i = 1; i <= static_cast<std::int64_t>(pt.values.size()); ++i) {
            if (pt.values[i - 1].sign() == 0) continue;
            cells.push_back({{"cell", mec::delinearize(i, e.dims())},
                             {"value", pt.values[i - 1].fraction_str()},
                             {"value_float", pt.values[i - 1].to_double()}});
        }
        entry["cells"] = std::move(cells);
        entry["witness_ranks"] = pt.witness_ranks;
        entry["entropy"] = mec::evaluate(p.entropy, pt.values);
        points.push_back(std::move(entry));
    }
    j["points"] = std::move(points);
    if (f.timings)
        j["timings"] = {{"enumerate_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                                             t1 - t0).count()}};
    emit(j, f);
    return 0;
}

// Lexicographically extends a complete forest to a spanning tree, when
// the greedy step suffices.
std::optional<mec::SupportSet> extend_to_tree(const mec::SupportSet& support) {
    mec::SupportSet grown = support;
    const std::int64_t want = mec::structure_order(grown.dims);
    mec::Classification cls = mec::classify(grown);
    if (!cls.is_forest) return std::nullopt;
    for (std::int64_t i = 1;
         i <= mec::cell_count(grown.dims) &&
         (static_cast<std::int64_t>(grown.size()) < want || !cls.is_tree);
         ++i) {
        const mec::Cell c = mec::delinearize(i, grown.dims);
        if (std::find(grown.cells.begin(), grown.cells.end(), c) != grown.cells.end())
            continue;
        mec::SupportSet trial = grown;
        trial.cells.push_back(c);
        trial = mec::SupportSet::of(trial.dims, trial.cells);
        const mec::Classification tc = mec::classify(trial);
        if (tc.is_forest) {
            grown = trial;
            cls = tc;
        }
    }
    if (cls.is_tree && static_cast<std::int64_t>(grown.size()) == want) return grown;
    return std::nullopt;
}

int cmd_verify(const std::string& path, const CommonFlags& f) {
    const mec::RawCoupling raw = mec::raw_coupling_from_json(load_json(path));
    json j;
    j["dims"] = raw.dims;
    bool all_ok = true;

    // exact marginal reproduction
    json marginal_errors = json::array();
    bool negative = false;
    for (const auto& v : raw.values)
        if (v.sign() < 0) negative = true;
    if (negative) marginal_errors.push_back("negative cell value");
    const auto sums = mec::marginals_of(raw.values, raw.dims);
    for (std::size_t t = 0; t < raw.dims.size(); ++t)
        for (std::size_t z = 0; z < sums[t].size(); ++z) {
            const mec::Rational deficit = raw.declared_marginals[t][z] - sums[t][z];
            if (deficit.sign() != 0)
                marginal_errors.push_back("axis " + std::to_string(t + 1) + " coordinate " +
                                          std::to_string(z + 1) + ": deficit " +
                                          deficit.fraction_str());
        }
    j["marginals_ok"] = marginal_errors.empty();
    j["marginal_errors"] = marginal_errors;
    all_ok = all_ok && marginal_errors.empty();

    // support classification
    std::vector<mec::Cell> cells;
    for (std::int64_t i = 1; i <= static_cast<std::int64_t>(raw.values.size()); ++i)
        if (raw.values[i - 1].sign() > 0) cells.push_back(mec::delinearize(i, raw.dims));
    const mec::SupportSet support = mec::SupportSet::of(raw.dims, cells);
    const mec::Classification cls = mec::classify(support);
    j["classification"] = {{"is_forest", cls.is_forest},
                           {"is_tree", cls.is_tree},
                           {"is_complete", cls.is_complete},
                           {"component_count", cls.component_count},
                           {"support_size", support.size()}};
    all_ok = all_ok && cls.is_forest && cls.is_complete;

    // local-optimality structure and kappa bounds (two-marginal notions)
    if (raw.dims.size() == 2 && marginal_errors.empty()) {
        const mec::Coupling c =
            mec::Coupling::create(raw.dims, raw.values, raw.declared_marginals);
        int kv = 1;
        bool have_kappa = true;
        try {
            kv = mec::kappa(raw.declared_marginals[0], raw.declared_marginals[1]);
        } catch (const mec::TooLarge&) {
            have_kappa = false;
        }
        if (have_kappa) {
            j["kappa"] = kv;
            const mec::LocalOptReport rep = mec::verify_local_optimal(c, kv);
            const auto check_json = [](const mec::CheckResult& r) {
                json cj;
                cj["ok"] = r.ok;
                if (!r.ok) cj["witness"] = r.witness;
                return cj;
            };
            j["local_optimality"] = {{"complete_forest", check_json(rep.complete_forest)},
                                     {"row_dichotomy", check_json(rep.row_dichotomy)},
                                     {"col_dichotomy", check_json(rep.col_dichotomy)},
                                     {"support_size", check_json(rep.support_size)},
                                     {"all_ok", rep.all_ok()}};
            all_ok = all_ok && rep.all_ok();
        }
    }

    // peeling cross-check: rebuild the coupling from a spanning tree
    // containing the support and compare cell for cell
    if (marginal_errors.empty() && cls.is_forest) {
        const auto tree = extend_to_tree(support);
        if (tree) {
            const auto peeled = mec::peel_coupling(*tree, raw.declared_marginals);
            const bool match = peeled && peeled->flat() == raw.values;
            j["peeling_cross_check"] = match ? "match" : "mismatch";
            all_ok = all_ok && match;
        } else {
            j["peeling_cross_check"] = "skipped (no spanning tree extension found)";
        }
    } else {
        j["peeling_cross_check"] = "skipped";
    }

    j["all_checks_pass"] = all_ok;
    emit(j, f);
    return all_ok ? 0 : 1;
}

int cmd_kappa(const std::string& path, const CommonFlags& f) {
    const mec::Problem p = load_problem(path, f);
    if (p.marginals.size() != 2)
        throw mec::NotTwoMarginal("kappa is defined for exactly two marginals");
    const mec::KappaResult r = mec::kappa_with_witness(p.marginals[0], p.marginals[1]);
    json j;
    j["kappa"] = r.value;
    j["sigma"] = r.sigma;
    j["pi"] = r.pi;
    json common = json::array();
    for (const auto& v : r.common) common.push_back(v.fraction_str());
    j["common_prefix_sums"] = std::move(common);
    emit(j, f);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact extreme-point enumeration and minimum-entropy couplings"};
    app.require_subcommand(1);

    std::string path;
    CommonFlags flags;
    CLI::App* solve = app.add_subcommand("solve", "enumerate and minimize entropy");
    CLI::App* extremes = app.add_subcommand("extremes", "list every extreme point");
    CLI::App* verify = app.add_subcommand("verify", "check a coupling file");
    CLI::App* kappa = app.add_subcommand("kappa", "structure constant of two marginals");
    for (CLI::App* cmd : {solve, extremes, verify, kappa}) {
        cmd->add_option("file", path, "input JSON file")->required();
        add_common_flags(cmd, flags);
    }

    CLI11_PARSE(app, argc, argv);
    try {
        if (solve->parsed()) return cmd_solve(path, flags);
        if (extremes->parsed()) return cmd_extremes(path, flags);
        if (verify->parsed()) return cmd_verify(path, flags);
        return cmd_kappa(path, flags);
    } catch (const mec::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mec::TooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// dser: command-line laboratory for the elementary orthogonal group over a
// commutative ring with a hyperbolic summand.
//
// Exit codes: 0 = every requested check held, 1 = some identity or
// verification failed, 2 = the request itself was unusable (bad flags, bad
// ring, inadmissible sizes, unreadable files).

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dser/acceptance.hpp"
#include "dser/relations.hpp"
#include "dser/report.hpp"

namespace {

using namespace dser;

QuadSetup make_setup(const std::string& ring_spec, int n, int m) {
    return QuadSetup::identity_form(Ring::parse(ring_spec), n, m);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read word file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t pick_budget(long cli_budget) {
    return cli_budget > 0 ? static_cast<size_t>(cli_budget) : closure_budget();
}

// ---- verify-relations ----------------------------------------------------

int run_verify_relations(const std::string& ring, int n, int m, int trials,
                         std::uint64_t seed, const std::string& out) {
    QuadSetup S = make_setup(ring, n, m);
    nlohmann::json j = report_envelope("verify-relations");
    j["ring"] = ring_to_report(S.R);
    j["n"] = n;
    j["m"] = m;
    j["trials"] = trials;
    j["seed"] = seed;
    nlohmann::json rel = nlohmann::json::object();
    bool ok = true;
    std::uint64_t idx = 0;
    for (RelId id : all_relations()) {
        ++idx;
        nlohmann::json entry;
        if (m < relation_min_m(id)) {
            entry["trials"] = 0;
            entry["failures"] = 0;
            entry["skipped"] = true;
            entry["first-failure-case"] = nullptr;
        } else {
            Rng rng(mix_seed(seed, idx));
            RelationBatch b = verify_relation(S, id, trials, rng);
            entry["trials"] = b.trials;
            entry["failures"] = b.failures;
            if (b.failures > 0) {
                entry["first-failure-case"] = b.first_failure;
                ok = false;
            } else {
                entry["first-failure-case"] = nullptr;
            }
        }
        rel[rel_name(id)] = entry;
    }
    j["relations"] = rel;
    j["all-held"] = ok;
    write_report(j, out, std::cout);
    return ok ? 0 : 1;
}

// ---- factor-conjugate ----------------------------------------------------

int run_factor_conjugate(const std::string& ring, int n, int m,
                         const std::string& cls_name, int trials,
                         std::uint64_t seed, const std::string& out) {
    auto cls = conj_class_parse(cls_name);
    if (!cls) throw std::invalid_argument("unknown generator class: " + cls_name);
    QuadSetup S = make_setup(ring, n, m);
    if (m < 2) throw std::invalid_argument("hyperbolic rank too small");
    QuadSetup Ssm = QuadSetup::identity_form(S.R, n, m - 1);

    nlohmann::json j = report_envelope("factor-conjugate");
    j["ring"] = ring_to_report(S.R);
    j["n"] = n;
    j["m"] = m;
    j["class"] = cls_name;
    j["trials"] = trials;
    j["seed"] = seed;

    int failures = 0;
    size_t max_atoms = 0;
    nlohmann::json first = nullptr;
    for (int t = 0; t < trials; ++t) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        Mat W = stabilize_matrix(Ssm, random_orthogonal(Ssm, rng));
        GenNodePtr gen = make_class_generator(S, *cls, rng);
        GenWord word = conjugate_factorization(S, W, gen);
        max_atoms = std::max(max_atoms, word.toks.size());
        Mat lhs = eval_word(S, word);
        Mat rhs = mat_mul(
            S.R, block_inverse(S, W),
            mat_mul(S.R, eval_node(S, gen), W));
        if (!mat_eq(lhs, rhs)) {
            ++failures;
            if (first.is_null())
                first = {{"trial", t}, {"conjugator", mat_to_report(W)}};
        }
    }
    j["failures"] = failures;
    j["first-failure"] = first;
    j["max-word-nodes"] = max_atoms;
    j["all-held"] = failures == 0;
    write_report(j, out, std::cout);
    return failures == 0 ? 0 : 1;
}

// ---- reduce --------------------------------------------------------------

int run_reduce(const std::string& ring, int n, int m,
               const std::string& word_path, const std::string& out) {
    QuadSetup S = make_setup(ring, n, m);
    GenWord w = word_from_json(S, slurp(word_path));
    Mat T = eval_word(S, w);
    ReductionTrace tr = reduce_to_smaller(S, T);

    Mat lhs = mat_mul(S.R, eval_left(S, tr.l4),
                      mat_mul(S.R, eval_left(S, tr.l3), T));
    lhs = mat_mul(S.R, lhs, pword_eval(S, tr.r1));
    lhs = mat_mul(S.R, lhs, pword_eval(S, tr.r2));
    const bool ok = mat_eq(lhs, tr.residual) && is_stabilized(S, tr.residual);

    nlohmann::json j = report_envelope("reduce");
    j["ring"] = ring_to_report(S.R);
    j["n"] = n;
    j["m"] = m;
    j["word-file"] = word_path;
    j["word-nodes"] = w.toks.size();
    j["input-matrix"] = mat_to_report(T);
    j["trace"] = trace_to_report(S, tr);
    j["invariant-holds"] = ok;
    write_report(j, out, std::cout);
    return ok ? 0 : 1;
}

// ---- decompose -----------------------------------------------------------

int run_decompose(const std::string& ring, int n, int m,
                  const std::string& word_path, long budget,
                  const std::string& out) {
    QuadSetup S = make_setup(ring, n, m);
    GenWord theta = word_from_json(S, slurp(word_path));
    Mat T = eval_word(S, theta);
    FdgTriple tri = fdg_decompose(S, theta, pick_budget(budget));

    Mat Me = pword_eval(S, tri.eta.toks);
    Mat Mx = pword_eval(S, tri.xi.toks);
    Mat Mm = pword_eval(S, tri.mu.toks);
    const bool product_ok = mat_eq(mat_mul(S.R, Me, mat_mul(S.R, Mx, Mm)), T);
    const bool tags_ok = tag_sound(S, tri.eta) && tag_sound(S, tri.xi) &&
                         tag_sound(S, tri.mu);
    const Elem corner = Me.at(S.n + S.m - 2, S.n + S.m - 1);
    const bool entry_ok = ring_is_zero(corner);
    const bool ok = product_ok && tags_ok && entry_ok && tri.reduced;

    nlohmann::json j = report_envelope("decompose");
    j["ring"] = ring_to_report(S.R);
    j["n"] = n;
    j["m"] = m;
    j["word-file"] = word_path;
    j["input-matrix"] = mat_to_report(T);
    j["eta"] = tagged_word_to_report(tri.eta);
    j["eta"]["matrix"] = mat_to_report(Me);
    j["eta"]["reduced-entry"] = ring_to_string(corner);
    j["xi"] = tagged_word_to_report(tri.xi);
    j["xi"]["matrix"] = mat_to_report(Mx);
    j["mu"] = tagged_word_to_report(tri.mu);
    j["mu"]["matrix"] = mat_to_report(Mm);
    j["reduced"] = tri.reduced;
    j["product-matches"] = product_ok;
    j["tags-sound"] = tags_ok;
    j["entry-zero"] = entry_ok;
    j["all-held"] = ok;
    write_report(j, out, std::cout);
    return ok ? 0 : 1;
}

// ---- enumerate -----------------------------------------------------------

int run_enumerate(const std::string& ring, int n, int m, long budget,
                  const std::string& out) {
    QuadSetup S = make_setup(ring, n, m);
    if (!S.R.finite()) throw std::invalid_argument("finite ring required");
    const size_t b = pick_budget(budget);
    GroupCensus O = enumerate_orthogonal(S, b);
    GroupCensus EO = enumerate_elementary(S, b);
    bool inside = true;
    for (const PackedMat& p : EO.elems)
        if (!O.contains(p)) { inside = false; break; }
    const bool normal = normality_verdict_parallel(S, O, EO);
    CosetSpace cs = coset_space(S, O, EO, normal);

    nlohmann::json j = report_envelope("enumerate");
    j["ring"] = ring_to_report(S.R);
    j["n"] = n;
    j["m"] = m;
    j["budget"] = b;
    j["orders"] = {{"orthogonal", O.size()}, {"elementary", EO.size()}};
    j["audited"] = {{"orthogonal", O.audited}, {"elementary", EO.audited}};
    j["generators"] = {{"orthogonal", O.generator_desc},
                       {"elementary", EO.generator_desc}};
    auto formula = orthogonal_order_formula(S);
    j["order-formula"] =
        formula ? nlohmann::json(*formula) : nlohmann::json(nullptr);
    j["elementary-inside-orthogonal"] = inside;
    j["normality-verdict"] = normal;
    j["coset-count"] = cs.size();
    j["index-divides"] = inside && O.size() % EO.size() == 0;
    j["all-held"] = inside;
    write_report(j, out, std::cout);
    return inside ? 0 : 1;
}

// ---- k1 ------------------------------------------------------------------

int run_k1(const std::string& ring, int n, const std::string& levels,
           long budget, const std::string& out) {
    const auto comma = levels.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("levels must be r,r+1");
    int lo = 0, hi = 0;
    try {
        lo = std::stoi(levels.substr(0, comma));
        hi = std::stoi(levels.substr(comma + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("levels must be r,r+1");
    }
    if (hi != lo + 1 || lo < 1)
        throw std::invalid_argument("levels must be r,r+1");
    Ring R = Ring::parse(ring);
    if (!R.finite()) throw std::invalid_argument("finite ring required");
    QuadSetup Ssm = QuadSetup::identity_form(R, n, lo);
    QuadSetup Sbig = QuadSetup::identity_form(R, n, hi);
    K1Report rep = k1_stability_check(Ssm, Sbig, pick_budget(budget));

    const bool ok = rep.surjective && rep.products_well_defined;
    nlohmann::json j = report_envelope("k1");
    j["ring"] = ring_to_report(R);
    j["n"] = n;
    j["levels"] = {lo, hi};
    j["orders"] = {{"orthogonal-small", rep.order_O_small},
                   {"elementary-small", rep.order_EO_small},
                   {"orthogonal-big", rep.order_O_big},
                   {"elementary-big", rep.order_EO_big}};
    j["coset-counts"] = {{"small", rep.cosets_small}, {"big", rep.cosets_big}};
    j["normality-verdicts"] = {{"small", rep.normal_small},
                               {"big", rep.normal_big}};
    j["surjective"] = rep.surjective;
    j["products-well-defined"] = rep.products_well_defined;
    j["all-held"] = ok;
    write_report(j, out, std::cout);
    return ok ? 0 : 1;
}

// ---- check-all -----------------------------------------------------------

int run_check_all(std::uint64_t seed) {
    auto results = run_all_criteria(seed);
    print_criteria(results, std::cout);
    return all_criteria_pass(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dser: exact constructions in the elementary orthogonal "
                 "group of a quadratic space with hyperbolic summands"};
    app.require_subcommand(1);

    std::string ring = "zmod:5", cls = "a_mj", word_path, levels = "1,2";
    std::string out = "-";
    int n = 1, m = 2, trials = 100;
    std::uint64_t seed = 0;
    long budget = 0;
    std::function<int()> runner;

    auto add_common = [&](CLI::App* sub, bool with_m = true) {
        sub->add_option("--ring", ring, "ring spec: rationals or zmod:<n>");
        sub->add_option("--n", n, "rank of the anisotropic part");
        if (with_m) sub->add_option("--m", m, "number of hyperbolic pairs");
        sub->add_option("--out", out, "output path, - for stdout");
    };

    auto* vr = app.add_subcommand(
        "verify-relations", "check the ten generator relations on random cases");
    add_common(vr);
    vr->add_option("--trials", trials, "cases per relation");
    vr->add_option("--seed", seed, "master seed");
    vr->callback([&] {
        runner = [&] { return run_verify_relations(ring, n, m, trials, seed, out); };
    });

    auto* fc = app.add_subcommand(
        "factor-conjugate",
        "factor a stabilized conjugate of a class generator into atoms");
    add_common(fc);
    fc->add_option("--class", cls,
                   "generator class: a_mj, bstar_mj, a_mj_bstar_kl, "
                   "a_ij_bstar_mk, a_mk_d_jl, bstar_mk_g_jl");
    fc->add_option("--trials", trials, "number of random conjugators");
    fc->add_option("--seed", seed, "master seed");
    fc->callback([&] {
        runner = [&] {
            return run_factor_conjugate(ring, n, m, cls, trials, seed, out);
        };
    });

    auto* rd = app.add_subcommand(
        "reduce", "row-reduce the corner of an elementary word's matrix");
    add_common(rd);
    rd->add_option("--word", word_path, "JSON word file")->required();
    rd->callback([&] {
        runner = [&] { return run_reduce(ring, n, m, word_path, out); };
    });

    auto* dc = app.add_subcommand(
        "decompose", "split an elementary word into an F-D-G triple");
    add_common(dc);
    dc->add_option("--word", word_path, "JSON word file")->required();
    dc->add_option("--budget", budget, "closure budget override");
    dc->callback([&] {
        runner = [&] { return run_decompose(ring, n, m, word_path, budget, out); };
    });

    auto* en = app.add_subcommand(
        "enumerate", "enumerate the orthogonal and elementary groups");
    add_common(en);
    en->add_option("--budget", budget, "closure budget override");
    en->callback([&] {
        runner = [&] { return run_enumerate(ring, n, m, budget, out); };
    });

    auto* k1 = app.add_subcommand(
        "k1", "coset-space stability between consecutive hyperbolic levels");
    add_common(k1, false);
    k1->add_option("--levels", levels, "pair of levels r,r+1");
    k1->add_option("--budget", budget, "closure budget override");
    k1->callback([&] {
        runner = [&] { return run_k1(ring, n, levels, budget, out); };
    });

    auto* ca = app.add_subcommand(
        "check-all", "run the full acceptance battery");
    ca->add_option("--seed", seed, "master seed");
    ca->callback([&] { runner = [&] { return run_check_all(seed); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message and usage hint
        return 2;
    }

    try {
        return runner ? runner() : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

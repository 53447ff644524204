// Acceptance suite: oracle- and property-based checks over seeded random
// system families. Each criterion prints one PASS/FAIL line; the process
// exits nonzero when any of them fails.

#include "qred/reduct.hpp"

#include "generators.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

using namespace qred;

namespace {

constexpr std::size_t kSeedsPerFamily = 500;
constexpr std::size_t kCurrySeeds = 200;
constexpr std::size_t kSynthSeeds = 100;

struct CriterionResult {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) {
            pass = false;
            detail = why;
        }
    }
};

using Criterion = std::function<void(CriterionResult&)>;

// The generator suite of criterion 1, reused by 3, 6 and 8.
const std::vector<System>& suite() {
    static const std::vector<System> systems = [] {
        std::vector<System> out;
        out.reserve(kSeedsPerFamily * 5);
        for (std::uint64_t seed = 0; seed < kSeedsPerFamily; ++seed) {
            out.push_back(testgen::random_lts(seed));
            out.push_back(testgen::random_wlts_nat(seed));
            out.push_back(testgen::random_wlts_rational(seed));
            out.push_back(testgen::random_ultras(seed));
            out.push_back(testgen::random_futs2(seed));
        }
        return out;
    }();
    return systems;
}

void criterion_oracle_equivalence(CriterionResult& res) {
    std::size_t checked = 0;
    for (const System& s : suite()) {
        if (largest_bisimulation(s) != oracle_largest_bisimulation(s)) {
            res.fail("refinement disagrees with the oracle on system #" +
                     std::to_string(checked));
            return;
        }
        ++checked;
    }
    res.detail = std::to_string(checked) + " systems";
}

void criterion_currying(CriterionResult& res) {
    for (std::uint64_t seed = 0; seed < kCurrySeeds; ++seed) {
        const System s = testgen::random_wlts_labels(seed);
        const auto to_wts = curry_reduction(s, CurryDirection::ToWts);

        for (const auto& p : all_partitions(s.num_states())) {
            if (is_kernel_bisimulation(s, p) != is_kernel_bisimulation(to_wts.target, p)) {
                res.fail("bis() differs across the currying on seed " + std::to_string(seed));
                return;
            }
        }
        if (!(curry_reduction(to_wts.target, CurryDirection::FromWts).target == s)) {
            res.fail("from-wts . to-wts is not the identity on seed " + std::to_string(seed));
            return;
        }
    }
    res.detail = std::to_string(kCurrySeeds) + " weighted systems";
}

// Constructors and compositions applicable to one source system.
std::vector<ReductionWitness> witnesses_for(const System& s) {
    std::vector<ReductionWitness> out;
    const auto wlts_nat = wlts_type({"l"}, Monoid::nat_plus());

    out.push_back(synthesize_reduction(s, lts_type({"l"})));
    if (is_wlts_view(s)) {
        auto to_wts = curry_reduction(s, CurryDirection::ToWts);
        out.push_back(compose_reductions(to_wts,
                                         curry_reduction(to_wts.target, CurryDirection::FromWts)));
        out.push_back(std::move(to_wts));
        auto cast = wlts_to_ultras(s);
        out.push_back(compose_reductions(cast, synthesize_reduction(cast.target, wlts_nat)));
        out.push_back(std::move(cast));
    } else {
        auto synth = synthesize_reduction(s, wlts_nat);
        out.push_back(compose_reductions(synth, wlts_to_ultras(synth.target)));
        out.push_back(std::move(synth));
    }
    if (is_lts_view(s)) {
        out.push_back(lts_to_wlts(s));
        out.push_back(compose_reductions(lts_to_wlts(s), curry_reduction(s, CurryDirection::ToWts)));
    }
    return out;
}

std::optional<ReductionWitness> mutate_collapse(const ReductionWitness& w) {
    if (w.source.num_states() < 2)
        return std::nullopt;
    ReductionWitness bad = w;
    bad.state_map.targets[1] = bad.state_map.targets[0];
    return bad;
}

std::optional<ReductionWitness> mutate_shuffle(const ReductionWitness& w,
                                               const std::vector<Partition>& bisims) {
    if (bisims.size() < 2)
        return std::nullopt;
    ReductionWitness bad = w;
    bad.rule = BisimRuleKind::Explicit;
    bad.pairs.clear();
    for (std::size_t i = 0; i < bisims.size(); ++i) {
        const auto images = apply_bisim_rule(w, bisims[i]);
        if (images.size() != 1)
            return std::nullopt;
        bad.pairs.emplace_back(bisims[(i + 1) % bisims.size()], images[0]);
    }
    return bad;
}

bool has_localized_counterexample(const VerifyReport& rep) {
    for (const auto& c : rep.checks)
        if (!c.pass && !c.detail.empty())
            return true;
    return false;
}

// Shared tallies between criteria 3 and 4.
struct WitnessAudit {
    std::size_t witnesses = 0;
    std::size_t mutations = 0;
    std::size_t passing = 0;
    std::size_t passing_injective = 0;
    std::size_t full_passing = 0;
    std::size_t full_bijective = 0;
    bool done = false;
};
WitnessAudit g_audit;

void criterion_diamond_verifier(CriterionResult& res) {
    for (const System& s : suite()) {
        const auto bisims = all_bisimulations(s);
        VerifyOptions opts;
        opts.source_bisimulations = &bisims;

        for (const auto& w : witnesses_for(s)) {
            const auto rep = verify_system_reduction(w, opts);
            ++g_audit.witnesses;
            if (!rep.pass || !rep.exhaustive) {
                res.fail("constructed witness (" + w.constructor + ") failed verification");
                return;
            }
            ++g_audit.passing;
            if (w.state_map.injective())
                ++g_audit.passing_injective;
            if (rep.full) {
                ++g_audit.full_passing;
                if (w.state_map.injective() &&
                    w.source.num_states() == w.target.num_states())
                    ++g_audit.full_bijective;
            }

            if (auto bad = mutate_collapse(w)) {
                const auto bad_rep = verify_system_reduction(*bad, opts);
                ++g_audit.mutations;
                if (bad_rep.pass || !has_localized_counterexample(bad_rep)) {
                    res.fail("collapsed sigma_c slipped through (" + w.constructor + ")");
                    return;
                }
            }
            if (auto bad = mutate_shuffle(w, bisims)) {
                const auto bad_rep = verify_system_reduction(*bad, opts);
                ++g_audit.mutations;
                if (bad_rep.pass || !has_localized_counterexample(bad_rep)) {
                    res.fail("shuffled sigma_b pairing slipped through (" + w.constructor + ")");
                    return;
                }
            }
        }
    }
    g_audit.done = true;
    res.detail = std::to_string(g_audit.witnesses) + " witnesses, " +
                 std::to_string(g_audit.mutations) + " mutations";
}

void criterion_injectivity_observables(CriterionResult& res) {
    if (!g_audit.done) {
        res.fail("verifier criterion did not complete");
        return;
    }
    if (g_audit.passing_injective != g_audit.passing)
        res.fail("a passing witness has a non-injective sigma_c");
    if (g_audit.full_bijective != g_audit.full_passing)
        res.fail("a passing full witness has a non-bijective sigma_c");
    res.detail = std::to_string(g_audit.passing) + " passing, " +
                 std::to_string(g_audit.full_passing) + " full";
}

void criterion_synthesis(CriterionResult& res) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < kSynthSeeds; ++seed) {
        const System s = [&] {
            switch (seed % 5) {
            case 0: return testgen::random_lts(seed);
            case 1: return testgen::random_wlts_nat(seed);
            case 2: return testgen::random_wlts_rational(seed);
            case 3: return testgen::random_ultras(seed);
            default: return testgen::random_futs2(seed);
            }
        }();
        for (const auto& target_type :
             {lts_type({"l"}), wlts_type({"l"}, Monoid::nat_plus())}) {
            const auto w = synthesize_reduction(s, target_type);
            if (!verify_system_reduction(w).pass) {
                res.fail("synthesized witness failed on seed " + std::to_string(seed));
                return;
            }
            const auto p = largest_bisimulation(w.target);
            for (StateId g1 = static_cast<StateId>(s.num_states());
                 g1 < w.target.num_states(); ++g1)
                for (StateId g2 = g1 + 1; g2 < w.target.num_states(); ++g2)
                    if (p.same_block(g1, g2)) {
                        res.fail("gadget states bisimilar on seed " + std::to_string(seed));
                        return;
                    }
            ++checked;
        }
    }
    res.detail = std::to_string(checked) + " synthesized witnesses";
}

void criterion_final_sequence(CriterionResult& res) {
    for (const System& s : suite()) {
        if (fingerprint_partition(s, s.num_states()) != largest_bisimulation(s)) {
            res.fail("fingerprint equivalence at depth |X| misses the largest bisimulation");
            return;
        }
    }

    const auto bool1 = wlts_type({"a"}, Monoid::bool_or());
    if (count_approximants(bool1, 3) != std::vector<std::uint64_t>{1, 2, 4, 16}) {
        res.fail("count_approximants(B, |A|=1, depth 3) != [1,2,4,16]");
        return;
    }
    const auto z2 = Monoid::table({"0", "1"}, {{"0", "1"}, {"1", "0"}}, "0", "1");
    const std::vector<std::pair<TypeDescriptor, std::size_t>> finite_descriptors{
        {bool1, 3},
        {wlts_type({"a", "b"}, Monoid::bool_or()), 2},
        {wlts_type({"a"}, z2), 2},
        {wts_type(power_monoid(Monoid::bool_or(), {"u", "v"})), 2},
        {TypeDescriptor{{ComponentType{{"a"}, {Monoid::bool_or(), Monoid::bool_or()}}}}, 1},
        {TypeDescriptor{{ComponentType{{"a"}, {Monoid::bool_or()}},
                         ComponentType{{"b"}, {z2}}}}, 2},
    };
    for (std::size_t i = 0; i < finite_descriptors.size(); ++i) {
        const auto& [t, depth] = finite_descriptors[i];
        if (count_approximants(t, depth) != approximant_recurrence(t, depth)) {
            res.fail("enumeration disagrees with the recurrence on descriptor #" +
                     std::to_string(i));
            return;
        }
    }
    res.detail = std::to_string(suite().size()) + " systems, " +
                 std::to_string(finite_descriptors.size()) + " finite descriptors";
}

void criterion_weight_monoid_matters(CriterionResult& res) {
    auto build = [](const MonoidPtr& m) {
        System s(wlts_type({"a"}, m), {"x", "x2", "y1", "y2"});
        const auto w = m->nonzero_witness();
        s.set_weight(0, 0, 0,
                     NestedWeight({m}, wf_make(m, {{WeightKey(StateId{2}), w},
                                                   {WeightKey(StateId{3}), w}})));
        s.set_weight(1, 0, 0,
                     NestedWeight({m}, wf_make(m, {{WeightKey(StateId{2}), w}})));
        return s;
    };
    const System over_nat = build(Monoid::nat_plus());
    const System over_bool = build(Monoid::bool_or());
    if (bisimilar(over_nat, "x", over_nat, "x2"))
        res.fail("x and x2 reported bisimilar over nat-plus");
    if (!bisimilar(over_bool, "x", over_bool, "x2"))
        res.fail("x and x2 reported non-bisimilar over bool-or");
}

void criterion_quotient_extensionality(CriterionResult& res) {
    for (const System& s : suite()) {
        const auto q = quotient_system(s, largest_bisimulation(s));
        if (largest_bisimulation(q.system) != Partition::discrete(q.system.num_states())) {
            res.fail("a minimized system still has bisimilar states");
            return;
        }
    }
    res.detail = std::to_string(suite().size()) + " systems";
}

struct Entry {
    const char* name;
    double time_limit_s; // 0: no stated bound
    Criterion run;
};

} // namespace

int main() {
    const std::vector<Entry> criteria = {
        {"1 oracle equivalence (5 families x 500 seeds, |X|<=5)", 60, criterion_oracle_equivalence},
        {"2 currying preserves bis() and round trips", 30, criterion_currying},
        {"3 condition-diamond verifier and mutations", 120, criterion_diamond_verifier},
        {"4 injectivity / bijectivity observables", 0, criterion_injectivity_observables},
        {"5 synthesized reductions with chain gadgets", 60, criterion_synthesis},
        {"6 final-sequence machinery", 30, criterion_final_sequence},
        {"7 weight monoid changes the equivalence", 1, criterion_weight_monoid_matters},
        {"8 quotient strong extensionality", 0, criterion_quotient_extensionality},
    };

    bool all_pass = true;
    for (const auto& entry : criteria) {
        CriterionResult res;
        const auto start = std::chrono::steady_clock::now();
        try {
            entry.run(res);
        } catch (const std::exception& e) {
            res.fail(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (entry.time_limit_s > 0 && elapsed > entry.time_limit_s)
            res.fail("exceeded the " + std::to_string(entry.time_limit_s) + "s budget");

        std::printf("[%s] criterion %s%s%s (%.1fs)\n", res.pass ? "PASS" : "FAIL", entry.name,
                    res.detail.empty() ? "" : ": ", res.detail.c_str(), elapsed);
        std::fflush(stdout);
        all_pass = all_pass && res.pass;
    }
    return all_pass ? 0 : 1;
}

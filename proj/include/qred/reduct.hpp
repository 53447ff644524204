#pragma once

#include "qred/bisim.hpp"

namespace qred {

// How a witness maps source bisimulations to target bisimulations.
//   Identity:        R is transported through sigma_c unchanged.
//   PadWithDiagonal: R is transported and target states outside the image
//                    of sigma_c become singletons.
//   Explicit:        a finite list of (R, R') pairs.
enum class BisimRuleKind { Identity, PadWithDiagonal, Explicit };

// A reduction between two concrete systems: an injective encoding of the
// source carrier plus a left-total correspondence on bisimulations,
// subject to the preserve-and-reflect condition the verifier checks.
struct ReductionWitness {
    ReductionWitness(System src, System tgt, StateMap map,
                     BisimRuleKind rule_kind = BisimRuleKind::Identity)
        : source(std::move(src)), target(std::move(tgt)), state_map(std::move(map)),
          rule(rule_kind) {}

    System source;
    System target;
    StateMap state_map; // sigma_c, indexed by source state
    BisimRuleKind rule = BisimRuleKind::Identity;
    std::vector<std::pair<Partition, Partition>> pairs; // Explicit rule only
    std::string constructor; // producing constructor, "" when unknown
    // Composition chain, kept in memory for naturality checks on composites.
    std::vector<ReductionWitness> stages;

    bool full() const; // sigma_c surjective

    nlohmann::json to_json() const;
    static ReductionWitness from_json(const nlohmann::json& j);
};

// Semantic comparison (source, target, map, rule); constructor metadata and
// stages are ignored.
bool witness_equal(const ReductionWitness& a, const ReductionWitness& b);

// Images of a source bisimulation under the witness rule. The results are
// raw block lists; the verifier decides whether they are valid partitions.
std::vector<Partition> apply_bisim_rule(const ReductionWitness& w, const Partition& r);

struct VerifyOptions {
    std::size_t exhaustive_limit = 6;
    std::uint64_t seed = 0;
    // Precomputed bis(source) to share across witnesses of one system.
    const std::vector<Partition>* source_bisimulations = nullptr;
};

struct VerifyReport {
    struct Check {
        std::string name;
        bool pass = true;
        std::string detail; // counterexample or note; empty when silent pass
    };
    std::vector<Check> checks;
    bool pass = false;
    bool full = false;
    bool exhaustive = false;
    std::size_t bisimulations_checked = 0;

    const Check* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

// Checks the reduction conditions pair by pair: for every enumerated source
// bisimulation R and image R', that R' is a bisimulation of the target and
// that relatedness is preserved and reflected through sigma_c. Also reports
// sigma_c injectivity, fullness, and for full witnesses bijectivity and
// right-uniqueness of the correspondence.
//
// bis(source) is enumerated exhaustively when the carrier is within
// `exhaustive_limit`; otherwise a sampled family is used: the diagonal, the
// largest bisimulation, and relative refinements from singleton-isolating
// and seeded random initial partitions.
VerifyReport verify_system_reduction(const ReductionWitness& w, const VerifyOptions& opts = {});

ReductionWitness identity_witness(const System& s);

// Reads an LTS as a WLTS over the boolean monoid; full, bisim-identity.
ReductionWitness lts_to_wlts(const System& s);

// Functional-ULTraS cast: wraps each weight function into the singleton
// {phi -> tt}. With drop_zero_entries the zero function becomes the empty
// set instead; that variant does not preserve bis() in general.
ReductionWitness wlts_to_ultras(const System& s, bool drop_zero_entries = false);

enum class CurryDirection { ToWts, FromWts };

// The currying isomorphism: ToWts moves labels into power-monoid weights
// (one designated label), FromWts is its inverse. Both directions are full
// with the diagonal bisimulation correspondence.
ReductionWitness curry_reduction(const System& s, CurryDirection dir);

// Finite analogue of the final-coalgebra construction: the target extends
// the source carrier with a chain gadget of one state per bisimulation
// class, distinguished pairwise by computation length; each source state
// adopts the behaviour of its class representative re-pointed at the chain.
// Works for any non-degenerate target type.
ReductionWitness synthesize_reduction(const System& s, const TypeDescriptor& target_type);

// Composes two witnesses when w1's target is w2's source; the composite
// map is the composition and the rules compose accordingly.
ReductionWitness compose_reductions(const ReductionWitness& w1, const ReductionWitness& w2);

// Checks the naturality square sigma_c_beta . f = sigma(f) . sigma_c_alpha
// for two witnesses from the same constructor and a homomorphism f between
// their sources, including that the induced sigma(f) is a homomorphism of
// the targets.
bool check_reduction_naturality(const ReductionWitness& wa, const ReductionWitness& wb,
                                const StateMap& f);

} // namespace qred

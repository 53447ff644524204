#pragma once

#include "qred/systems.hpp"

namespace qred {

// Behavioural signature of a state under a quotient map, flattened to the
// canonical string of the (component, label)-tuple of pushforwards. Two
// states in one block of a kernel bisimulation must agree on this.
std::string state_signature(const System& s, StateId x, const std::vector<std::uint32_t>& block_of);

// True iff the partition's quotient map carries a homomorphism, i.e. its
// kernel is a bisimulation.
bool is_kernel_bisimulation(const System& s, const Partition& p);

// The standard commuting square: pushforward along f of the source
// structure equals the target structure at f(x), for every state, component
// and label.
bool is_homomorphism(const StateMap& f, const System& src, const System& tgt);

// Coarsest kernel bisimulation by signature refinement from the single
// block (or from a user-supplied initial partition for relative
// refinement). Terminates within |X| rounds.
Partition largest_bisimulation(const System& s);
Partition largest_bisimulation(const System& s, const Partition& initial);

// Brute-force oracle: enumerates every set partition of the carrier,
// filters by is_kernel_bisimulation and returns the coarsest, asserting it
// is unique and refined by every other passing partition.
Partition oracle_largest_bisimulation(const System& s, std::size_t limit = 6);

// All kernel bisimulations of `s`, by exhaustive partition enumeration.
std::vector<Partition> all_bisimulations(const System& s, std::size_t limit = 6);

struct QuotientResult {
    System system;
    StateMap map; // the quotient homomorphism
};

// Aggregates states block-wise; refuses when P is not a bisimulation since
// the quotient structure would be ill-defined. Blocks are named after their
// least member.
QuotientResult quotient_system(const System& s, const Partition& p);

// Cross-system state equivalence through the disjoint union.
bool bisimilar(const System& s1, StateId x, const System& s2, StateId y);
bool bisimilar(const System& s1, const std::string& x, const System& s2, const std::string& y);

// An element of the n-th final-sequence approximant F_n, as a canonical
// nested tree: F_0 is the one-point set, an F_{n+1} value is the
// (component, label)-tuple of nested weights over F_n values.
class Fingerprint {
public:
    Fingerprint(std::size_t depth, std::vector<NestedWeight> slots, std::string canon)
        : depth_(depth), slots_(std::move(slots)), canon_(std::move(canon)) {}

    std::size_t depth() const { return depth_; }
    const std::vector<NestedWeight>& slots() const { return slots_; }
    const std::string& canon() const { return canon_; }

    static FingerprintPtr unit();

private:
    std::size_t depth_;
    std::vector<NestedWeight> slots_; // flattened (component, label), declaration order
    std::string canon_;
};

// Depth-n approximant value of a state: depth 0 is the unique point,
// depth n+1 pushes the structure forward along the depth-n fingerprints.
FingerprintPtr fingerprint(const System& s, StateId x, std::size_t depth);
// All states at once (fingerprints are shared below the top level).
std::vector<FingerprintPtr> fingerprints(const System& s, std::size_t depth);

// Partition of the carrier by equal depth-n fingerprints.
Partition fingerprint_partition(const System& s, std::size_t depth);

// |F_0|, ..., |F_depth| by explicit enumeration of approximant elements;
// only defined when every monoid in `t` is finite. `budget` caps the level
// size before the doubly exponential growth gets out of hand.
std::vector<std::uint64_t> count_approximants(const TypeDescriptor& t, std::size_t depth,
                                              std::uint64_t budget = 1u << 20);

// Closed-form recurrence |F_{k+1}| = prod_i |F_{M_i...} F_k| ^ |A_i| with
// checked arithmetic; the independent cross-check for count_approximants.
std::vector<std::uint64_t> approximant_recurrence(const TypeDescriptor& t, std::size_t depth);

} // namespace qred

#pragma once

#include "qred/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qred {

// One product component of a behaviour type: a finite nonempty label set
// and a nonempty stack of non-trivial weight monoids [M_0,...,M_m].
struct ComponentType {
    std::vector<std::string> labels;
    std::vector<MonoidPtr> stack;

    friend bool operator==(const ComponentType& a, const ComponentType& b);
};

// A behaviour type in the FuTS grammar: an ordered product of components.
// WLTS is one component with stack length 1, LTS the special case over the
// boolean monoid, ULTraS the stack [B, M].
struct TypeDescriptor {
    std::vector<ComponentType> components;

    void validate() const; // throws DegenerateTypeError on empty/trivial parts
    std::size_t label_index(std::size_t comp, const std::string& label) const;

    nlohmann::json to_json() const;
    static TypeDescriptor from_json(const nlohmann::json& j);

    friend bool operator==(const TypeDescriptor& a, const TypeDescriptor& b);
};

TypeDescriptor lts_type(std::vector<std::string> labels);
TypeDescriptor wlts_type(std::vector<std::string> labels, MonoidPtr m);
TypeDescriptor ultras_type(std::vector<std::string> labels, MonoidPtr m);
TypeDescriptor wts_type(MonoidPtr m);

// The one designated label of "unlabelled" weighted transition systems.
extern const char* const kWtsLabel;

// A finite system: named states and a total structure map assigning every
// (state, component, label) a canonical nested weight over the carrier.
// Immutable once built; set_weight is the construction hook.
class System {
public:
    System(TypeDescriptor type, std::vector<std::string> states);

    const TypeDescriptor& type() const { return type_; }
    std::size_t num_states() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }
    const std::string& state_name(StateId x) const { return states_.at(x); }
    StateId state_index(const std::string& name) const; // throws on unknown name
    std::optional<StateId> find_state(const std::string& name) const;

    const NestedWeight& weight(StateId x, std::size_t comp, std::size_t label) const;
    void set_weight(StateId x, std::size_t comp, std::size_t label, NestedWeight nw);
    // Merges into the existing entry by the outer monoid sum.
    void add_weight(StateId x, std::size_t comp, std::size_t label, const NestedWeight& nw);

    friend bool operator==(const System& a, const System& b);

private:
    void check_entry(StateId x, std::size_t comp, std::size_t label,
                     const NestedWeight* nw) const;

    TypeDescriptor type_;
    std::vector<std::string> states_;
    std::unordered_map<std::string, StateId> index_;
    // structure_[x][comp][label]
    std::vector<std::vector<std::vector<NestedWeight>>> structure_;
};

// View predicates over the unified representation.
bool is_lts_view(const System& s);    // single component, stack [B]
bool is_wlts_view(const System& s);   // single component, stack [M]
bool is_ultras_view(const System& s); // single component, stack [B, M]
bool is_wts_view(const System& s);    // single component, single label, stack [M]
// Every outer level of an ULTraS-view system is a singleton or empty.
bool is_functional(const System& s);

// A set of disjoint nonempty blocks covering the carrier. Canonical form:
// members ascending, blocks ordered by least member.
struct Partition {
    std::vector<std::vector<StateId>> blocks;

    static Partition discrete(std::size_t n);
    static Partition single_block(std::size_t n);

    void canonicalize();
    void validate(std::size_t n) const; // disjointness + coverage, throws DomainError
    std::vector<std::uint32_t> block_of(std::size_t n) const;
    bool same_block(StateId x, StateId y) const;
    std::size_t size() const { return blocks.size(); }

    nlohmann::json to_json(const System& s) const;
    static Partition from_json(const nlohmann::json& j, const System& s);

    friend bool operator==(const Partition& a, const Partition& b);
};

// True when every block of `fine` is contained in a block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse, std::size_t n);

// All set partitions of {0..n-1} via restricted growth strings.
std::vector<Partition> all_partitions(std::size_t n);

// Total function between carriers, indexed by source state.
struct StateMap {
    std::vector<StateId> targets;

    static StateMap identity(std::size_t n);
    StateId operator()(StateId x) const { return targets.at(x); }
    std::size_t size() const { return targets.size(); }
    bool injective() const;

    friend bool operator==(const StateMap& a, const StateMap& b) = default;
};

StateMap compose(const StateMap& first, const StateMap& then);

struct DisjointUnion {
    System system;
    StateMap left;
    StateMap right;
};

// Tagged union of two systems of the same type; both injections are
// homomorphisms by construction.
DisjointUnion disjoint_union(const System& a, const System& b);

// On-disk format (JSON, UTF-8):
//   { "type": [ { "labels": ["a","b"], "stack": [{"kind":"nat-plus"}] } ],
//     "states": ["x","y"],
//     "trans": [ { "from":"x", "comp":0, "label":"a", "weight": [["y","3"]] } ] }
// Missing (state, component, label) entries default to the zero weight;
// duplicate entries merge by the outer monoid sum.
System parse_system(const std::string& text);
System system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const System& s);
// Deterministic canonical output; equal systems serialize byte-identically.
std::string serialize_system(const System& s);

struct ValidationReport {
    struct Violation {
        std::string where;
        std::string what;
    };
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

// Re-checks every System invariant on a built value.
ValidationReport validate_system(const System& s);
// Report-based validation of raw text: semantic violations are collected
// with their location instead of thrown. Malformed JSON still throws.
ValidationReport validate_system_text(const std::string& text);

} // namespace qred

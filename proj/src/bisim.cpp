#include "qred/bisim.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace qred {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw LimitError("approximant count overflow");
    return r;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i)
        r = checked_mul(r, base);
    return r;
}

} // namespace

std::string state_signature(const System& s, StateId x,
                            const std::vector<std::uint32_t>& block_of) {
    auto to_block = [&](StateId y) { return WeightKey(static_cast<StateId>(block_of[y])); };
    std::string sig;
    const auto& comps = s.type().components;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (std::size_t l = 0; l < comps[i].labels.size(); ++l) {
            sig += nested_pushforward(to_block, s.weight(x, i, l)).canon();
            sig += ';';
        }
    }
    return sig;
}

bool is_kernel_bisimulation(const System& s, const Partition& p) {
    p.validate(s.num_states());
    const auto block_of = p.block_of(s.num_states());
    for (const auto& block : p.blocks) {
        if (block.size() < 2)
            continue;
        const std::string ref = state_signature(s, block.front(), block_of);
        for (std::size_t i = 1; i < block.size(); ++i)
            if (state_signature(s, block[i], block_of) != ref)
                return false;
    }
    return true;
}

bool is_homomorphism(const StateMap& f, const System& src, const System& tgt) {
    if (!(src.type() == tgt.type()))
        throw TypeError("homomorphism check between systems of different types");
    if (f.size() != src.num_states())
        throw DomainError("state map is not total on the source carrier");
    for (StateId t : f.targets)
        if (t >= tgt.num_states())
            throw DomainError("state map leaves the target carrier");

    auto mapped = [&](StateId y) { return WeightKey(f(y)); };
    const auto& comps = src.type().components;
    for (StateId x = 0; x < src.num_states(); ++x)
        for (std::size_t i = 0; i < comps.size(); ++i)
            for (std::size_t l = 0; l < comps[i].labels.size(); ++l)
                if (!(nested_pushforward(mapped, src.weight(x, i, l)) == tgt.weight(f(x), i, l)))
                    return false;
    return true;
}

namespace {

// Split each block by signature. Grouping hashes the canonical strings and
// the map confirms candidates by exact equality, so collisions cannot merge
// distinct signatures; canonicalization makes the result order-independent.
Partition split_by_signature(const System& s, const Partition& current) {
    const auto block_of = current.block_of(s.num_states());
    Partition next;
    for (const auto& block : current.blocks) {
        std::unordered_map<std::string, std::vector<StateId>> groups;
        for (StateId x : block)
            groups[state_signature(s, x, block_of)].push_back(x);
        for (auto& [sig, members] : groups)
            next.blocks.push_back(std::move(members));
    }
    next.canonicalize();
    return next;
}

} // namespace

Partition largest_bisimulation(const System& s) {
    return largest_bisimulation(s, Partition::single_block(s.num_states()));
}

Partition largest_bisimulation(const System& s, const Partition& initial) {
    Partition current = initial;
    current.canonicalize();
    current.validate(s.num_states());
    // Naive signature splitting. A Paige-Tarjan splitter queue would cut
    // the per-round cost, but carriers here are small enough not to care.
    // Each round either strictly refines or reaches the fixpoint, so at
    // most |X| rounds happen.
    for (std::size_t round = 0; round <= s.num_states() + 1; ++round) {
        Partition next = split_by_signature(s, current);
        if (next == current)
            return current;
        current = std::move(next);
    }
    throw Error("signature refinement failed to stabilise within |X| rounds");
}

std::vector<Partition> all_bisimulations(const System& s, std::size_t limit) {
    if (s.num_states() > limit)
        throw LimitError("carrier exceeds the exhaustive enumeration limit of " +
                         std::to_string(limit));
    std::vector<Partition> out;
    for (auto& p : all_partitions(s.num_states()))
        if (is_kernel_bisimulation(s, p))
            out.push_back(std::move(p));
    return out;
}

Partition oracle_largest_bisimulation(const System& s, std::size_t limit) {
    const auto passing = all_bisimulations(s, limit);
    std::vector<const Partition*> coarsest;
    for (const auto& cand : passing) {
        bool above_all = true;
        for (const auto& other : passing)
            if (!refines(other, cand, s.num_states())) {
                above_all = false;
                break;
            }
        if (above_all)
            coarsest.push_back(&cand);
    }
    if (coarsest.size() != 1)
        throw Error("oracle: the passing partitions have no unique coarsest element "
                    "(lattice structure violated)");
    return *coarsest.front();
}

QuotientResult quotient_system(const System& s, const Partition& p) {
    Partition canon = p;
    canon.canonicalize();
    if (!is_kernel_bisimulation(s, canon))
        throw DomainError("partition is not a kernel bisimulation; quotient refused");

    const auto block_of = canon.block_of(s.num_states());
    std::vector<std::string> names;
    names.reserve(canon.blocks.size());
    for (const auto& block : canon.blocks)
        names.push_back(s.state_name(block.front()));

    System q(s.type(), std::move(names));
    auto to_block = [&](StateId y) { return WeightKey(static_cast<StateId>(block_of[y])); };
    const auto& comps = s.type().components;
    for (std::uint32_t b = 0; b < canon.blocks.size(); ++b) {
        const StateId rep = canon.blocks[b].front();
        for (std::size_t i = 0; i < comps.size(); ++i)
            for (std::size_t l = 0; l < comps[i].labels.size(); ++l)
                q.set_weight(b, i, l, nested_pushforward(to_block, s.weight(rep, i, l)));
    }

    StateMap map;
    map.targets.assign(block_of.begin(), block_of.end());
    return QuotientResult{std::move(q), std::move(map)};
}

bool bisimilar(const System& s1, StateId x, const System& s2, StateId y) {
    if (x >= s1.num_states() || y >= s2.num_states())
        throw DomainError("state index out of range");
    auto u = disjoint_union(s1, s2);
    const Partition p = largest_bisimulation(u.system);
    return p.same_block(u.left(x), u.right(y));
}

bool bisimilar(const System& s1, const std::string& x, const System& s2, const std::string& y) {
    return bisimilar(s1, s1.state_index(x), s2, s2.state_index(y));
}

FingerprintPtr Fingerprint::unit() {
    static const FingerprintPtr u = std::make_shared<const Fingerprint>(0, std::vector<NestedWeight>{}, "0:u");
    return u;
}

const std::string& fingerprint_canon(const Fingerprint& f) { return f.canon(); }

nlohmann::json fingerprint_to_json(const Fingerprint& f) {
    if (f.depth() == 0)
        return "unit";
    // The slots flatten (component, label); without the descriptor at hand
    // the external form keeps the flat array. The CLI re-attaches labels.
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& nw : f.slots())
        arr.push_back(nested_to_json(nw, {}));
    return arr;
}

namespace {

std::string make_fingerprint_canon(std::size_t depth, const std::vector<NestedWeight>& slots) {
    std::string c = std::to_string(depth) + ":[";
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i)
            c += ",";
        c += slots[i].canon();
    }
    return c + "]";
}

} // namespace

std::vector<FingerprintPtr> fingerprints(const System& s, std::size_t depth) {
    std::vector<FingerprintPtr> level(s.num_states(), Fingerprint::unit());
    const auto& comps = s.type().components;
    for (std::size_t d = 1; d <= depth; ++d) {
        // Intern per level so equal values share one node.
        std::map<std::string, FingerprintPtr> interned;
        std::vector<FingerprintPtr> next(s.num_states());
        for (StateId x = 0; x < s.num_states(); ++x) {
            auto to_approx = [&](StateId y) { return WeightKey(level[y]); };
            std::vector<NestedWeight> slots;
            for (std::size_t i = 0; i < comps.size(); ++i)
                for (std::size_t l = 0; l < comps[i].labels.size(); ++l)
                    slots.push_back(nested_pushforward(to_approx, s.weight(x, i, l)));
            std::string canon = make_fingerprint_canon(d, slots);
            auto it = interned.find(canon);
            if (it == interned.end())
                it = interned.emplace(canon, std::make_shared<const Fingerprint>(
                                                 d, std::move(slots), canon)).first;
            next[x] = it->second;
        }
        level = std::move(next);
    }
    return level;
}

FingerprintPtr fingerprint(const System& s, StateId x, std::size_t depth) {
    if (x >= s.num_states())
        throw DomainError("state index out of range");
    return fingerprints(s, depth)[x];
}

Partition fingerprint_partition(const System& s, std::size_t depth) {
    const auto fps = fingerprints(s, depth);
    std::map<std::string, std::vector<StateId>> groups;
    for (StateId x = 0; x < s.num_states(); ++x)
        groups[fps[x]->canon()].push_back(x);
    Partition p;
    for (auto& [canon, members] : groups)
        p.blocks.push_back(std::move(members));
    p.canonicalize();
    return p;
}

namespace {

// All weight functions over the given keys in a finite monoid, i.e. all
// functions keys -> M (every such function is finitely supported).
std::vector<WeightFunction> enumerate_weight_functions(const MonoidPtr& m,
                                                       const std::vector<WeightKey>& keys,
                                                       std::uint64_t budget) {
    const auto carrier = m->enumerate_carrier();
    const std::uint64_t expected = checked_pow(carrier.size(), keys.size());
    if (expected > budget)
        throw LimitError("approximant enumeration budget exceeded");

    std::vector<WeightFunction> out;
    out.reserve(expected);
    std::vector<std::size_t> odo(keys.size(), 0);
    while (true) {
        std::vector<WeightFunction::Entry> pairs;
        for (std::size_t i = 0; i < keys.size(); ++i)
            pairs.emplace_back(keys[i], carrier[odo[i]]);
        out.push_back(wf_make(m, std::move(pairs)));
        std::size_t i = 0;
        for (; i < odo.size(); ++i) {
            if (++odo[i] < carrier.size())
                break;
            odo[i] = 0;
        }
        if (i == odo.size())
            break;
    }
    return out;
}

// All elements of F_{M0}(F_{M1}(... F_{Mm} base)) as nested weights.
std::vector<NestedWeight> enumerate_nested(const std::vector<MonoidPtr>& stack,
                                           const std::vector<FingerprintPtr>& base,
                                           std::uint64_t budget) {
    std::vector<WeightKey> keys;
    for (const auto& f : base)
        keys.push_back(WeightKey(f));

    std::vector<NestedWeight> current;
    for (std::size_t level = stack.size(); level-- > 0;) {
        std::vector<MonoidPtr> sub(stack.begin() + level, stack.end());
        if (level + 1 < stack.size()) {
            keys.clear();
            for (const auto& nw : current)
                keys.push_back(WeightKey(std::make_shared<const NestedWeight>(nw)));
        }
        std::vector<NestedWeight> next;
        for (auto& wf : enumerate_weight_functions(stack[level], keys, budget))
            next.emplace_back(sub, std::move(wf));
        current = std::move(next);
    }
    return current;
}

} // namespace

std::vector<std::uint64_t> count_approximants(const TypeDescriptor& t, std::size_t depth,
                                              std::uint64_t budget) {
    t.validate();
    for (const auto& c : t.components)
        for (const auto& m : c.stack)
            if (!m->finite())
                throw TypeError("count_approximants needs finite monoids, got " + m->name());

    std::vector<std::uint64_t> counts{1};
    std::vector<FingerprintPtr> level{Fingerprint::unit()};

    for (std::size_t d = 1; d <= depth; ++d) {
        std::vector<std::vector<NestedWeight>> per_component;
        std::uint64_t total = 1;
        for (const auto& c : t.components) {
            auto elems = enumerate_nested(c.stack, level, budget);
            total = checked_mul(total, checked_pow(elems.size(), c.labels.size()));
            per_component.push_back(std::move(elems));
        }
        if (total > budget)
            throw LimitError("approximant enumeration budget exceeded");

        // Odometer over the flattened (component, label) slots.
        std::vector<std::size_t> slot_comp;
        for (std::size_t i = 0; i < t.components.size(); ++i)
            for (std::size_t l = 0; l < t.components[i].labels.size(); ++l)
                slot_comp.push_back(i);

        std::set<std::string> canons;
        std::vector<FingerprintPtr> next;
        std::vector<std::size_t> odo(slot_comp.size(), 0);
        while (true) {
            std::vector<NestedWeight> slots;
            slots.reserve(slot_comp.size());
            for (std::size_t i = 0; i < slot_comp.size(); ++i)
                slots.push_back(per_component[slot_comp[i]][odo[i]]);
            std::string canon = make_fingerprint_canon(d, slots);
            if (canons.insert(canon).second)
                next.push_back(std::make_shared<const Fingerprint>(d, std::move(slots), canon));
            std::size_t i = 0;
            for (; i < odo.size(); ++i) {
                if (++odo[i] < per_component[slot_comp[i]].size())
                    break;
                odo[i] = 0;
            }
            if (i == odo.size())
                break;
        }
        counts.push_back(next.size());
        level = std::move(next);
    }
    return counts;
}

std::vector<std::uint64_t> approximant_recurrence(const TypeDescriptor& t, std::size_t depth) {
    t.validate();
    std::vector<std::uint64_t> counts{1};
    for (std::size_t d = 1; d <= depth; ++d) {
        std::uint64_t total = 1;
        for (const auto& c : t.components) {
            std::uint64_t inner = counts.back();
            for (std::size_t level = c.stack.size(); level-- > 0;)
                inner = checked_pow(c.stack[level]->carrier_size(), inner);
            total = checked_mul(total, checked_pow(inner, c.labels.size()));
        }
        counts.push_back(total);
    }
    return counts;
}

} // namespace qred

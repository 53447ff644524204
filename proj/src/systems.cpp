#include "qred/systems.hpp"

#include <algorithm>
#include <unordered_set>

namespace qred {

const char* const kWtsLabel = "★"; // ★

bool operator==(const ComponentType& a, const ComponentType& b) {
    if (a.labels != b.labels || a.stack.size() != b.stack.size())
        return false;
    for (std::size_t i = 0; i < a.stack.size(); ++i)
        if (!same_monoid(a.stack[i], b.stack[i]))
            return false;
    return true;
}

bool operator==(const TypeDescriptor& a, const TypeDescriptor& b) {
    return a.components == b.components;
}

void TypeDescriptor::validate() const {
    if (components.empty())
        throw DegenerateTypeError("behaviour type with no components");
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (c.labels.empty())
            throw DegenerateTypeError("component " + std::to_string(i) + " has an empty label set");
        std::unordered_set<std::string> seen(c.labels.begin(), c.labels.end());
        if (seen.size() != c.labels.size())
            throw DegenerateTypeError("component " + std::to_string(i) + " has duplicate labels");
        if (c.stack.empty())
            throw DegenerateTypeError("component " + std::to_string(i) + " has an empty monoid stack");
        for (const auto& m : c.stack) {
            if (!m)
                throw TypeError("component " + std::to_string(i) + " has a null monoid");
            if (m->trivial())
                throw DegenerateTypeError("component " + std::to_string(i) +
                                          " uses the trivial monoid " + m->name());
        }
    }
}

std::size_t TypeDescriptor::label_index(std::size_t comp, const std::string& label) const {
    const auto& labels = components.at(comp).labels;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label)
            return i;
    throw ParseError("unknown label '" + label + "' in component " + std::to_string(comp));
}

nlohmann::json TypeDescriptor::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : components) {
        nlohmann::json stack = nlohmann::json::array();
        for (const auto& m : c.stack)
            stack.push_back(m->to_json());
        arr.push_back(nlohmann::json{{"labels", c.labels}, {"stack", std::move(stack)}});
    }
    return arr;
}

TypeDescriptor TypeDescriptor::from_json(const nlohmann::json& j) {
    if (!j.is_array())
        throw ParseError("\"type\" must be an array of components");
    TypeDescriptor t;
    for (const auto& cj : j) {
        if (!cj.is_object() || !cj.contains("labels") || !cj.contains("stack"))
            throw ParseError("type component needs \"labels\" and \"stack\"");
        ComponentType c;
        for (const auto& l : cj.at("labels")) {
            if (!l.is_string())
                throw ParseError("labels must be strings");
            c.labels.push_back(l.get<std::string>());
        }
        for (const auto& mj : cj.at("stack"))
            c.stack.push_back(Monoid::from_json(mj));
        t.components.push_back(std::move(c));
    }
    t.validate();
    return t;
}

TypeDescriptor lts_type(std::vector<std::string> labels) {
    return wlts_type(std::move(labels), Monoid::bool_or());
}

TypeDescriptor wlts_type(std::vector<std::string> labels, MonoidPtr m) {
    TypeDescriptor t{{ComponentType{std::move(labels), {std::move(m)}}}};
    t.validate();
    return t;
}

TypeDescriptor ultras_type(std::vector<std::string> labels, MonoidPtr m) {
    TypeDescriptor t{{ComponentType{std::move(labels), {Monoid::bool_or(), std::move(m)}}}};
    t.validate();
    return t;
}

TypeDescriptor wts_type(MonoidPtr m) {
    return wlts_type({kWtsLabel}, std::move(m));
}

System::System(TypeDescriptor type, std::vector<std::string> states)
    : type_(std::move(type)), states_(std::move(states)) {
    type_.validate();
    for (StateId i = 0; i < states_.size(); ++i)
        if (!index_.emplace(states_[i], i).second)
            throw ParseError("duplicate state name '" + states_[i] + "'");
    structure_.resize(states_.size());
    for (auto& per_state : structure_) {
        per_state.reserve(type_.components.size());
        for (const auto& c : type_.components)
            per_state.emplace_back(c.labels.size(), NestedWeight::zero(c.stack));
    }
}

StateId System::state_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw ParseError("unknown state '" + name + "'");
    return it->second;
}

std::optional<StateId> System::find_state(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

void System::check_entry(StateId x, std::size_t comp, std::size_t label,
                         const NestedWeight* nw) const {
    if (x >= states_.size())
        throw DomainError("state index out of range");
    if (comp >= type_.components.size())
        throw DomainError("component index out of range");
    if (label >= type_.components[comp].labels.size())
        throw DomainError("label index out of range");
    if (!nw)
        return;
    const auto& stack = type_.components[comp].stack;
    if (nw->stack().size() != stack.size())
        throw TypeError("weight stack depth differs from component stack");
    for (std::size_t i = 0; i < stack.size(); ++i)
        if (!same_monoid(nw->stack()[i], stack[i]))
            throw TypeError("weight monoid differs from component stack");
    // Innermost keys must be declared states.
    std::function<void(const NestedWeight&)> check_keys = [&](const NestedWeight& w) {
        for (const auto& [k, v] : w.body().entries()) {
            if (k.kind() == WeightKey::Kind::State) {
                if (k.state() >= states_.size())
                    throw DomainError("weight references undeclared state");
            } else if (k.kind() == WeightKey::Kind::Nested) {
                check_keys(k.nested());
            } else {
                throw TypeError("system structure keyed by an approximant");
            }
        }
    };
    check_keys(*nw);
}

const NestedWeight& System::weight(StateId x, std::size_t comp, std::size_t label) const {
    check_entry(x, comp, label, nullptr);
    return structure_[x][comp][label];
}

void System::set_weight(StateId x, std::size_t comp, std::size_t label, NestedWeight nw) {
    check_entry(x, comp, label, &nw);
    structure_[x][comp][label] = std::move(nw);
}

void System::add_weight(StateId x, std::size_t comp, std::size_t label, const NestedWeight& nw) {
    check_entry(x, comp, label, &nw);
    structure_[x][comp][label] = nested_add(structure_[x][comp][label], nw);
}

bool operator==(const System& a, const System& b) {
    if (!(a.type_ == b.type_) || a.states_ != b.states_)
        return false;
    return a.structure_ == b.structure_;
}

bool is_lts_view(const System& s) {
    const auto& cs = s.type().components;
    return cs.size() == 1 && cs[0].stack.size() == 1 && cs[0].stack[0]->kind() == MonoidKind::BoolOr;
}

bool is_wlts_view(const System& s) {
    const auto& cs = s.type().components;
    return cs.size() == 1 && cs[0].stack.size() == 1;
}

bool is_ultras_view(const System& s) {
    const auto& cs = s.type().components;
    return cs.size() == 1 && cs[0].stack.size() == 2 &&
           cs[0].stack[0]->kind() == MonoidKind::BoolOr;
}

bool is_wts_view(const System& s) {
    const auto& cs = s.type().components;
    return cs.size() == 1 && cs[0].labels.size() == 1 && cs[0].stack.size() == 1;
}

bool is_functional(const System& s) {
    if (!is_ultras_view(s))
        return false;
    const auto& labels = s.type().components[0].labels;
    for (StateId x = 0; x < s.num_states(); ++x)
        for (std::size_t a = 0; a < labels.size(); ++a)
            if (s.weight(x, 0, a).body().size() > 1)
                return false;
    return true;
}

Partition Partition::discrete(std::size_t n) {
    Partition p;
    for (StateId i = 0; i < n; ++i)
        p.blocks.push_back({i});
    return p;
}

Partition Partition::single_block(std::size_t n) {
    Partition p;
    if (n > 0) {
        std::vector<StateId> all(n);
        for (StateId i = 0; i < n; ++i)
            all[i] = i;
        p.blocks.push_back(std::move(all));
    }
    return p;
}

void Partition::canonicalize() {
    for (auto& b : blocks)
        std::sort(b.begin(), b.end());
    std::erase_if(blocks, [](const auto& b) { return b.empty(); });
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

void Partition::validate(std::size_t n) const {
    std::vector<bool> seen(n, false);
    for (const auto& b : blocks) {
        if (b.empty())
            throw DomainError("partition contains an empty block");
        for (StateId x : b) {
            if (x >= n)
                throw DomainError("partition mentions a state outside the carrier");
            if (seen[x])
                throw DomainError("partition blocks are not disjoint");
            seen[x] = true;
        }
    }
    for (std::size_t x = 0; x < n; ++x)
        if (!seen[x])
            throw DomainError("partition does not cover the carrier");
}

std::vector<std::uint32_t> Partition::block_of(std::size_t n) const {
    std::vector<std::uint32_t> out(n, UINT32_MAX);
    for (std::uint32_t b = 0; b < blocks.size(); ++b)
        for (StateId x : blocks[b]) {
            if (x >= n)
                throw DomainError("partition mentions a state outside the carrier");
            out[x] = b;
        }
    for (std::size_t x = 0; x < n; ++x)
        if (out[x] == UINT32_MAX)
            throw DomainError("partition does not cover the carrier");
    return out;
}

bool Partition::same_block(StateId x, StateId y) const {
    for (const auto& b : blocks) {
        const bool has_x = std::find(b.begin(), b.end(), x) != b.end();
        const bool has_y = std::find(b.begin(), b.end(), y) != b.end();
        if (has_x || has_y)
            return has_x && has_y;
    }
    return false;
}

nlohmann::json Partition::to_json(const System& s) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : blocks) {
        nlohmann::json block = nlohmann::json::array();
        for (StateId x : b)
            block.push_back(s.state_name(x));
        arr.push_back(std::move(block));
    }
    return arr;
}

Partition Partition::from_json(const nlohmann::json& j, const System& s) {
    if (!j.is_array())
        throw ParseError("partition must be an array of blocks");
    Partition p;
    for (const auto& bj : j) {
        if (!bj.is_array())
            throw ParseError("partition block must be an array of state names");
        std::vector<StateId> block;
        for (const auto& name : bj) {
            if (!name.is_string())
                throw ParseError("partition entries must be state names");
            block.push_back(s.state_index(name.get<std::string>()));
        }
        p.blocks.push_back(std::move(block));
    }
    p.canonicalize();
    p.validate(s.num_states());
    return p;
}

bool operator==(const Partition& a, const Partition& b) { return a.blocks == b.blocks; }

bool refines(const Partition& fine, const Partition& coarse, std::size_t n) {
    const auto coarse_of = coarse.block_of(n);
    for (const auto& b : fine.blocks)
        for (StateId x : b)
            if (coarse_of[x] != coarse_of[b.front()])
                return false;
    return true;
}

std::vector<Partition> all_partitions(std::size_t n) {
    std::vector<Partition> out;
    if (n == 0) {
        out.push_back(Partition{});
        return out;
    }
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    std::vector<std::uint32_t> a(n, 0);
    while (true) {
        std::uint32_t nblocks = *std::max_element(a.begin(), a.end()) + 1;
        Partition p;
        p.blocks.assign(nblocks, {});
        for (StateId i = 0; i < n; ++i)
            p.blocks[a[i]].push_back(i);
        p.canonicalize();
        out.push_back(std::move(p));

        std::size_t i = n;
        while (i-- > 1) {
            std::uint32_t maxprefix = 0;
            for (std::size_t j = 0; j < i; ++j)
                maxprefix = std::max(maxprefix, a[j]);
            if (a[i] <= maxprefix) {
                ++a[i];
                std::fill(a.begin() + i + 1, a.end(), 0);
                break;
            }
            a[i] = 0;
        }
        if (i == 0)
            break;
    }
    return out;
}

StateMap StateMap::identity(std::size_t n) {
    StateMap f;
    f.targets.resize(n);
    for (StateId i = 0; i < n; ++i)
        f.targets[i] = i;
    return f;
}

bool StateMap::injective() const {
    std::unordered_set<StateId> seen;
    for (StateId t : targets)
        if (!seen.insert(t).second)
            return false;
    return true;
}

StateMap compose(const StateMap& first, const StateMap& then) {
    StateMap out;
    out.targets.reserve(first.size());
    for (StateId x : first.targets)
        out.targets.push_back(then(x));
    return out;
}

DisjointUnion disjoint_union(const System& a, const System& b) {
    if (!(a.type() == b.type()))
        throw TypeError("disjoint union of systems with different types");

    bool collide = false;
    for (const auto& name : b.states())
        if (a.find_state(name)) {
            collide = true;
            break;
        }

    std::vector<std::string> names;
    names.reserve(a.num_states() + b.num_states());
    for (const auto& n : a.states())
        names.push_back(collide ? "0:" + n : n);
    for (const auto& n : b.states())
        names.push_back(collide ? "1:" + n : n);

    System u(a.type(), std::move(names));
    const StateId offset = static_cast<StateId>(a.num_states());

    const auto& comps = a.type().components;
    for (StateId x = 0; x < a.num_states(); ++x)
        for (std::size_t i = 0; i < comps.size(); ++i)
            for (std::size_t l = 0; l < comps[i].labels.size(); ++l)
                u.set_weight(x, i, l, a.weight(x, i, l));
    for (StateId x = 0; x < b.num_states(); ++x)
        for (std::size_t i = 0; i < comps.size(); ++i)
            for (std::size_t l = 0; l < comps[i].labels.size(); ++l)
                u.set_weight(offset + x, i, l,
                             nested_pushforward(
                                 [offset](StateId y) { return WeightKey(offset + y); },
                                 b.weight(x, i, l)));

    StateMap left = StateMap::identity(a.num_states());
    StateMap right;
    right.targets.resize(b.num_states());
    for (StateId x = 0; x < b.num_states(); ++x)
        right.targets[x] = offset + x;
    return DisjointUnion{std::move(u), std::move(left), std::move(right)};
}

namespace {

// Shared by the strict parser and the report-based validator. With a
// collector, recoverable problems are recorded and the offending entries
// dropped; without one the first problem is thrown.
std::optional<System> system_from_json_impl(const nlohmann::json& j, ValidationReport* rep) {
    auto fail = [&](const std::string& where, const Error& e) -> bool {
        if (!rep)
            throw;
        rep->violations.push_back({where, e.what()});
        return false;
    };

    if (!j.is_object() || !j.contains("type") || !j.contains("states"))
        throw ParseError("system file must be an object with \"type\" and \"states\"");

    TypeDescriptor type;
    try {
        type = TypeDescriptor::from_json(j.at("type"));
    } catch (const Error& e) {
        fail("type", e);
        return std::nullopt;
    }

    std::vector<std::string> states;
    if (!j.at("states").is_array())
        throw ParseError("\"states\" must be an array");
    for (const auto& sj : j.at("states")) {
        if (!sj.is_string())
            throw ParseError("state names must be strings");
        states.push_back(sj.get<std::string>());
    }

    std::optional<System> sys;
    try {
        sys.emplace(std::move(type), std::move(states));
    } catch (const Error& e) {
        fail("states", e);
        return std::nullopt;
    }

    std::unordered_map<std::string, StateId> ids;
    for (StateId i = 0; i < sys->num_states(); ++i)
        ids.emplace(sys->state_name(i), i);

    if (j.contains("trans")) {
        if (!j.at("trans").is_array())
            throw ParseError("\"trans\" must be an array");
        std::size_t n = 0;
        for (const auto& tj : j.at("trans")) {
            const std::string where = "trans[" + std::to_string(n++) + "]";
            try {
                if (!tj.is_object() || !tj.contains("from") || !tj.contains("comp") ||
                    !tj.contains("label") || !tj.contains("weight"))
                    throw ParseError("transition needs \"from\", \"comp\", \"label\", \"weight\"");
                if (!tj.at("from").is_string())
                    throw ParseError("\"from\" must be a state name");
                if (!tj.at("comp").is_number_unsigned())
                    throw ParseError("\"comp\" must be a component index");
                if (!tj.at("label").is_string())
                    throw ParseError("\"label\" must be a label name");

                const StateId from = sys->state_index(tj.at("from").get<std::string>());
                const std::size_t comp = tj.at("comp").get<std::size_t>();
                if (comp >= sys->type().components.size())
                    throw ParseError("component index out of range");
                const std::size_t label =
                    sys->type().label_index(comp, tj.at("label").get<std::string>());
                const auto& stack = sys->type().components[comp].stack;
                NestedWeight nw = nested_from_json(tj.at("weight"), stack, ids);
                sys->add_weight(from, comp, label, nw);
            } catch (const Error& e) {
                fail(where, e);
            }
        }
    }
    return sys;
}

} // namespace

System system_from_json(const nlohmann::json& j) {
    auto s = system_from_json_impl(j, nullptr);
    return std::move(*s);
}

System parse_system(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return system_from_json(j);
}

nlohmann::json system_to_json(const System& s) {
    nlohmann::json j;
    j["type"] = s.type().to_json();
    j["states"] = s.states();
    nlohmann::json trans = nlohmann::json::array();
    const auto& comps = s.type().components;
    for (StateId x = 0; x < s.num_states(); ++x) {
        for (std::size_t i = 0; i < comps.size(); ++i) {
            for (std::size_t l = 0; l < comps[i].labels.size(); ++l) {
                const NestedWeight& nw = s.weight(x, i, l);
                if (nw.is_zero())
                    continue;
                nlohmann::json t;
                t["from"] = s.state_name(x);
                t["comp"] = i;
                t["label"] = comps[i].labels[l];
                t["weight"] = nested_to_json(nw, s.states());
                trans.push_back(std::move(t));
            }
        }
    }
    j["trans"] = std::move(trans);
    return j;
}

std::string serialize_system(const System& s) { return system_to_json(s).dump(); }

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : violations)
        arr.push_back(nlohmann::json{{"where", v.where}, {"what", v.what}});
    return nlohmann::json{{"valid", ok()}, {"violations", std::move(arr)}};
}

ValidationReport validate_system(const System& s) {
    ValidationReport rep;
    try {
        s.type().validate();
    } catch (const Error& e) {
        rep.violations.push_back({"type", e.what()});
    }
    const auto& comps = s.type().components;
    for (StateId x = 0; x < s.num_states(); ++x) {
        for (std::size_t i = 0; i < comps.size(); ++i) {
            for (std::size_t l = 0; l < comps[i].labels.size(); ++l) {
                const std::string where = s.state_name(x) + "/" + std::to_string(i) + "/" +
                                          comps[i].labels[l];
                const NestedWeight& nw = s.weight(x, i, l);
                if (nw.stack().size() != comps[i].stack.size()) {
                    rep.violations.push_back({where, "weight stack depth mismatch"});
                    continue;
                }
                for (std::size_t d = 0; d < nw.stack().size(); ++d)
                    if (!same_monoid(nw.stack()[d], comps[i].stack[d]))
                        rep.violations.push_back({where, "weight monoid mismatch"});
                std::function<void(const NestedWeight&)> walk = [&](const NestedWeight& w) {
                    for (const auto& [k, v] : w.body().entries()) {
                        if (w.body().monoid()->is_zero(v))
                            rep.violations.push_back({where, "stored zero weight"});
                        if (k.kind() == WeightKey::Kind::State) {
                            if (k.state() >= s.num_states())
                                rep.violations.push_back({where, "undeclared state in weight"});
                        } else if (k.kind() == WeightKey::Kind::Nested) {
                            walk(k.nested());
                        } else {
                            rep.violations.push_back({where, "approximant key in structure"});
                        }
                    }
                };
                walk(nw);
            }
        }
    }
    return rep;
}

ValidationReport validate_system_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    ValidationReport rep;
    auto sys = system_from_json_impl(j, &rep);
    if (sys) {
        auto more = validate_system(*sys);
        rep.violations.insert(rep.violations.end(), more.violations.begin(),
                              more.violations.end());
    }
    return rep;
}

} // namespace qred

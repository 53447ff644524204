#include "qred/reduct.hpp"

#include <algorithm>
#include <random>

namespace qred {

namespace {

std::string partition_str(const Partition& p, const System& s) {
    return p.to_json(s).dump();
}

const char* rule_name(BisimRuleKind k) {
    switch (k) {
    case BisimRuleKind::Identity:
        return "identity";
    case BisimRuleKind::PadWithDiagonal:
        return "pad-diagonal";
    case BisimRuleKind::Explicit:
        return "explicit";
    }
    return "?";
}

BisimRuleKind rule_from_name(const std::string& name) {
    if (name == "identity")
        return BisimRuleKind::Identity;
    if (name == "pad-diagonal")
        return BisimRuleKind::PadWithDiagonal;
    if (name == "explicit")
        return BisimRuleKind::Explicit;
    throw ParseError("unknown bisim rule '" + name + "'");
}

} // namespace

bool ReductionWitness::full() const {
    std::vector<bool> hit(target.num_states(), false);
    for (StateId t : state_map.targets)
        if (t < hit.size())
            hit[t] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

nlohmann::json ReductionWitness::to_json() const {
    nlohmann::json j;
    nlohmann::json sigma = nlohmann::json::object();
    for (StateId x = 0; x < state_map.size(); ++x)
        sigma[source.state_name(x)] = target.state_name(state_map(x));
    j["sigma_c"] = std::move(sigma);
    j["rule"] = rule_name(rule);
    if (rule == BisimRuleKind::Explicit) {
        nlohmann::json ps = nlohmann::json::array();
        for (const auto& [r, r2] : pairs)
            ps.push_back(nlohmann::json::array({r.to_json(source), r2.to_json(target)}));
        j["pairs"] = std::move(ps);
    }
    if (!constructor.empty())
        j["constructor"] = constructor;
    j["source"] = system_to_json(source);
    j["target"] = system_to_json(target);
    return j;
}

ReductionWitness ReductionWitness::from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw ParseError("witness must be an object");
    for (const char* field : {"sigma_c", "rule", "source", "target"})
        if (!j.contains(field))
            throw ParseError(std::string("witness needs \"") + field + "\"");

    ReductionWitness w{system_from_json(j.at("source")), system_from_json(j.at("target")),
                       StateMap{}, rule_from_name(j.at("rule").get<std::string>())};
    w.state_map.targets.resize(w.source.num_states());
    std::vector<bool> seen(w.source.num_states(), false);
    for (auto it = j.at("sigma_c").begin(); it != j.at("sigma_c").end(); ++it) {
        const StateId x = w.source.state_index(it.key());
        w.state_map.targets[x] = w.target.state_index(it.value().get<std::string>());
        seen[x] = true;
    }
    for (StateId x = 0; x < w.source.num_states(); ++x)
        if (!seen[x])
            throw ParseError("sigma_c is not total: missing '" + w.source.state_name(x) + "'");

    if (w.rule == BisimRuleKind::Explicit) {
        if (!j.contains("pairs"))
            throw ParseError("explicit-rule witness needs \"pairs\"");
        for (const auto& pj : j.at("pairs")) {
            if (!pj.is_array() || pj.size() != 2)
                throw ParseError("rule pair must be [partition, partition]");
            w.pairs.emplace_back(Partition::from_json(pj[0], w.source),
                                 Partition::from_json(pj[1], w.target));
        }
    }
    if (j.contains("constructor"))
        w.constructor = j.at("constructor").get<std::string>();
    return w;
}

bool witness_equal(const ReductionWitness& a, const ReductionWitness& b) {
    return a.source == b.source && a.target == b.target && a.state_map == b.state_map &&
           a.rule == b.rule && a.pairs == b.pairs;
}

std::vector<Partition> apply_bisim_rule(const ReductionWitness& w, const Partition& r) {
    switch (w.rule) {
    case BisimRuleKind::Identity:
    case BisimRuleKind::PadWithDiagonal: {
        Partition image;
        for (const auto& block : r.blocks) {
            std::vector<StateId> mapped;
            mapped.reserve(block.size());
            for (StateId x : block)
                mapped.push_back(w.state_map(x));
            image.blocks.push_back(std::move(mapped));
        }
        if (w.rule == BisimRuleKind::PadWithDiagonal) {
            std::vector<bool> hit(w.target.num_states(), false);
            for (StateId t : w.state_map.targets)
                hit[t] = true;
            for (StateId t = 0; t < w.target.num_states(); ++t)
                if (!hit[t])
                    image.blocks.push_back({t});
        }
        image.canonicalize();
        return {std::move(image)};
    }
    case BisimRuleKind::Explicit: {
        Partition canon = r;
        canon.canonicalize();
        std::vector<Partition> out;
        for (const auto& [dom, img] : w.pairs)
            if (dom == canon)
                out.push_back(img);
        return out;
    }
    }
    throw Error("unreachable rule kind");
}

const VerifyReport::Check* VerifyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        if (!c.detail.empty())
            e["detail"] = c.detail;
        arr.push_back(std::move(e));
    }
    nlohmann::json j;
    j["pass"] = pass;
    j["full"] = full;
    j["exhaustive"] = exhaustive;
    j["bisimulations_checked"] = bisimulations_checked;
    j["checks"] = std::move(arr);
    return j;
}

namespace {

// Sampled bis(source) family for carriers beyond the exhaustive limit:
// genuine kernel bisimulations obtained as relative refinements.
std::vector<Partition> sampled_bisimulations(const System& s, std::uint64_t seed) {
    std::vector<Partition> out;
    auto push_unique = [&](Partition p) {
        if (std::find(out.begin(), out.end(), p) == out.end())
            out.push_back(std::move(p));
    };
    push_unique(Partition::discrete(s.num_states()));
    push_unique(largest_bisimulation(s));
    for (StateId x = 0; x < s.num_states(); ++x) {
        Partition seed_part;
        seed_part.blocks.push_back({x});
        std::vector<StateId> rest;
        for (StateId y = 0; y < s.num_states(); ++y)
            if (y != x)
                rest.push_back(y);
        if (!rest.empty())
            seed_part.blocks.push_back(std::move(rest));
        push_unique(largest_bisimulation(s, seed_part));
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t nblocks = 2 + rng() % 3;
        Partition seed_part;
        seed_part.blocks.assign(nblocks, {});
        for (StateId x = 0; x < s.num_states(); ++x)
            seed_part.blocks[rng() % nblocks].push_back(x);
        seed_part.canonicalize();
        if (seed_part.blocks.empty() && s.num_states() > 0)
            continue;
        push_unique(largest_bisimulation(s, seed_part));
    }
    return out;
}

} // namespace

VerifyReport verify_system_reduction(const ReductionWitness& w, const VerifyOptions& opts) {
    VerifyReport rep;
    const System& src = w.source;
    const System& tgt = w.target;

    VerifyReport::Check total{"sigma-c-total", true, ""};
    if (w.state_map.size() != src.num_states()) {
        total.pass = false;
        total.detail = "sigma_c defined on " + std::to_string(w.state_map.size()) + " of " +
                       std::to_string(src.num_states()) + " source states";
    } else {
        for (StateId t : w.state_map.targets)
            if (t >= tgt.num_states()) {
                total.pass = false;
                total.detail = "sigma_c leaves the target carrier";
                break;
            }
    }
    rep.checks.push_back(total);
    if (!total.pass) {
        rep.pass = false;
        return rep;
    }

    VerifyReport::Check inj{"sigma-c-injective", true, ""};
    for (StateId x = 0; x < src.num_states() && inj.pass; ++x)
        for (StateId y = x + 1; y < src.num_states(); ++y)
            if (w.state_map(x) == w.state_map(y)) {
                inj.pass = false;
                inj.detail = "sigma_c collapses '" + src.state_name(x) + "' and '" +
                             src.state_name(y) + "'";
                break;
            }
    rep.checks.push_back(inj);

    rep.full = w.full();
    rep.exhaustive = src.num_states() <= opts.exhaustive_limit;

    std::vector<Partition> bisims;
    if (opts.source_bisimulations)
        bisims = *opts.source_bisimulations;
    else if (rep.exhaustive)
        bisims = all_bisimulations(src, opts.exhaustive_limit);
    else
        bisims = sampled_bisimulations(src, opts.seed);
    rep.bisimulations_checked = bisims.size();

    VerifyReport::Check left_total{"rule-left-total", true, ""};
    VerifyReport::Check image_part{"rule-image-partition", true, ""};
    VerifyReport::Check image_bisim{"rule-image-bisimulation", true, ""};
    VerifyReport::Check diamond{"diamond-preserve-reflect", true, ""};
    VerifyReport::Check right_unique{"full-rule-right-unique", true, ""};

    for (const auto& r : bisims) {
        const auto images = apply_bisim_rule(w, r);
        if (images.empty() && left_total.pass) {
            left_total.pass = false;
            left_total.detail = "no image for R=" + partition_str(r, src);
        }
        if (rep.full && images.size() > 1 && right_unique.pass) {
            right_unique.pass = false;
            right_unique.detail = std::to_string(images.size()) + " images for R=" +
                                  partition_str(r, src);
        }
        for (const auto& r2 : images) {
            try {
                r2.validate(tgt.num_states());
            } catch (const Error& e) {
                if (image_part.pass) {
                    image_part.pass = false;
                    image_part.detail = std::string(e.what()) + " for R=" + partition_str(r, src);
                }
                continue;
            }
            if (!is_kernel_bisimulation(tgt, r2)) {
                if (image_bisim.pass) {
                    image_bisim.pass = false;
                    image_bisim.detail = "R'=" + partition_str(r2, tgt) +
                                         " is not a bisimulation of the target (R=" +
                                         partition_str(r, src) + ")";
                }
                continue;
            }
            const auto rb = r.block_of(src.num_states());
            const auto r2b = r2.block_of(tgt.num_states());
            for (StateId x = 0; x < src.num_states() && diamond.pass; ++x) {
                for (StateId y = x; y < src.num_states(); ++y) {
                    const bool in_r = rb[x] == rb[y];
                    const bool in_r2 = r2b[w.state_map(x)] == r2b[w.state_map(y)];
                    if (in_r != in_r2) {
                        diamond.pass = false;
                        diamond.detail = "states ('" + src.state_name(x) + "','" +
                                         src.state_name(y) + "') are " +
                                         (in_r ? "related" : "unrelated") + " by R=" +
                                         partition_str(r, src) + " but " +
                                         (in_r2 ? "related" : "unrelated") + " by R'=" +
                                         partition_str(r2, tgt);
                        break;
                    }
                }
            }
        }
    }
    rep.checks.push_back(left_total);
    rep.checks.push_back(image_part);
    rep.checks.push_back(image_bisim);
    rep.checks.push_back(diamond);

    if (rep.full) {
        VerifyReport::Check iso{"full-sigma-c-bijective", true, ""};
        if (!inj.pass || src.num_states() != tgt.num_states()) {
            iso.pass = false;
            iso.detail = "sigma_c is surjective but not a bijection of carriers";
        }
        rep.checks.push_back(iso);
        rep.checks.push_back(right_unique);
    }

    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const VerifyReport::Check& c) { return c.pass; });
    return rep;
}

ReductionWitness identity_witness(const System& s) {
    ReductionWitness w{s, s, StateMap::identity(s.num_states()), BisimRuleKind::Identity};
    w.constructor = "identity";
    return w;
}

ReductionWitness lts_to_wlts(const System& s) {
    if (!is_lts_view(s))
        throw TypeError("lts_to_wlts needs a single component over the boolean monoid");
    ReductionWitness w{s, s, StateMap::identity(s.num_states()), BisimRuleKind::Identity};
    w.constructor = "lts-to-wlts";
    return w;
}

ReductionWitness wlts_to_ultras(const System& s, bool drop_zero_entries) {
    if (!is_wlts_view(s))
        throw TypeError("wlts_to_ultras needs a single component with a one-monoid stack");
    const auto& comp = s.type().components[0];
    const MonoidPtr outer = Monoid::bool_or();
    System target(ultras_type(comp.labels, comp.stack[0]), s.states());
    const std::vector<MonoidPtr> stack{outer, comp.stack[0]};

    for (StateId x = 0; x < s.num_states(); ++x) {
        for (std::size_t l = 0; l < comp.labels.size(); ++l) {
            const NestedWeight& phi = s.weight(x, 0, l);
            if (drop_zero_entries && phi.is_zero())
                continue; // zero entry stays the empty set
            auto key = WeightKey(std::make_shared<const NestedWeight>(phi));
            target.set_weight(x, 0, l,
                              NestedWeight(stack, wf_make(outer, {{key, WeightValue(true)}})));
        }
    }
    ReductionWitness w{s, std::move(target), StateMap::identity(s.num_states()),
                       BisimRuleKind::Identity};
    w.constructor = "wlts-to-ultras";
    return w;
}

ReductionWitness curry_reduction(const System& s, CurryDirection dir) {
    if (s.type().components.size() != 1 || s.type().components[0].stack.size() != 1)
        throw TypeError("curry_reduction needs a single component with a one-monoid stack");
    const auto& comp = s.type().components[0];

    if (dir == CurryDirection::ToWts) {
        const MonoidPtr pm = power_monoid(comp.stack[0], comp.labels);
        System target(wlts_type({kWtsLabel}, pm), s.states());
        for (StateId x = 0; x < s.num_states(); ++x) {
            std::vector<WeightFunction> per_label;
            per_label.reserve(comp.labels.size());
            for (std::size_t l = 0; l < comp.labels.size(); ++l)
                per_label.push_back(s.weight(x, 0, l).body());
            target.set_weight(x, 0, 0, NestedWeight({pm}, wf_curry(pm, per_label)));
        }
        ReductionWitness w{s, std::move(target), StateMap::identity(s.num_states()),
                           BisimRuleKind::Identity};
        w.constructor = "curry-to-wts";
        return w;
    }

    if (comp.labels.size() != 1 || comp.stack[0]->kind() != MonoidKind::Power)
        throw TypeError("curry_reduction from-wts needs one label over a power monoid");
    const MonoidPtr& pm = comp.stack[0];
    System target(wlts_type(pm->labels(), pm->inner()), s.states());
    for (StateId x = 0; x < s.num_states(); ++x) {
        auto per_label = wf_uncurry(s.weight(x, 0, 0).body());
        for (std::size_t l = 0; l < per_label.size(); ++l)
            target.set_weight(x, 0, l, NestedWeight({pm->inner()}, std::move(per_label[l])));
    }
    ReductionWitness w{s, std::move(target), StateMap::identity(s.num_states()),
                       BisimRuleKind::Identity};
    w.constructor = "curry-from-wts";
    return w;
}

namespace {

// Innermost singleton {dest -> witness} wrapped outward to the full stack.
NestedWeight chain_weight(const std::vector<MonoidPtr>& stack, StateId dest) {
    NestedWeight nw(std::vector<MonoidPtr>{stack.back()},
                    wf_make(stack.back(), {{WeightKey(dest), stack.back()->nonzero_witness()}}));
    for (std::size_t level = stack.size() - 1; level-- > 0;) {
        std::vector<MonoidPtr> sub(stack.begin() + level, stack.end());
        auto key = WeightKey(std::make_shared<const NestedWeight>(std::move(nw)));
        nw = NestedWeight(std::move(sub),
                          wf_make(stack[level], {{key, stack[level]->nonzero_witness()}}));
    }
    return nw;
}

} // namespace

ReductionWitness synthesize_reduction(const System& s, const TypeDescriptor& target_type) {
    target_type.validate();

    // Class indices follow the canonical block order (by least state).
    const Partition classes = largest_bisimulation(s);
    const std::size_t k = classes.size();
    const StateId n = static_cast<StateId>(s.num_states());

    std::string prefix = "g";
    auto taken = [&](const std::string& p) {
        for (std::size_t j = 0; j < k; ++j)
            if (s.find_state(p + std::to_string(j)))
                return true;
        return false;
    };
    while (taken(prefix))
        prefix = "_" + prefix;

    std::vector<std::string> names = s.states();
    for (std::size_t j = 0; j < k; ++j)
        names.push_back(prefix + std::to_string(j));

    System target(target_type, std::move(names));
    const auto& stack = target_type.components[0].stack;
    const auto block_of = classes.block_of(n);

    // g_0 is dead; g_j steps to g_{j-1}; a source state of class j behaves
    // like g_j, so the chain length encodes the class index.
    for (std::size_t j = 1; j < k; ++j)
        target.set_weight(n + static_cast<StateId>(j), 0, 0,
                          chain_weight(stack, n + static_cast<StateId>(j) - 1));
    for (StateId x = 0; x < n; ++x)
        if (block_of[x] >= 1)
            target.set_weight(x, 0, 0, chain_weight(stack, n + block_of[x] - 1));

    ReductionWitness w{s, std::move(target), StateMap::identity(n),
                       BisimRuleKind::PadWithDiagonal};
    w.constructor = "synthesize";
    return w;
}

ReductionWitness compose_reductions(const ReductionWitness& w1, const ReductionWitness& w2) {
    if (!(w1.target == w2.source))
        throw TypeError("compose_reductions: middle systems differ");

    ReductionWitness out{w1.source, w2.target, compose(w1.state_map, w2.state_map)};
    if (w1.rule == BisimRuleKind::Explicit) {
        out.rule = BisimRuleKind::Explicit;
        for (const auto& [r, mid] : w1.pairs)
            for (const auto& r2 : apply_bisim_rule(w2, mid))
                out.pairs.emplace_back(r, r2);
    } else if (w2.rule == BisimRuleKind::Explicit) {
        throw TypeError("compose_reductions: cannot compose a rule-based witness "
                        "with an explicit-pair witness on the right");
    } else if (w1.rule == BisimRuleKind::Identity && w2.rule == BisimRuleKind::Identity) {
        out.rule = BisimRuleKind::Identity;
    } else {
        // The composite's non-image states are exactly the images of the
        // stages' padding states, so one pad rule over the composed map works.
        out.rule = BisimRuleKind::PadWithDiagonal;
    }

    out.constructor = w1.constructor + ";" + w2.constructor;
    if (w1.stages.empty())
        out.stages.push_back(w1);
    else
        out.stages = w1.stages;
    if (w2.stages.empty())
        out.stages.push_back(w2);
    else
        out.stages.insert(out.stages.end(), w2.stages.begin(), w2.stages.end());
    return out;
}

namespace {

// The constructor's action on homomorphisms: identity-extension for casts
// and currying, f + gadget-identity for synthesized witnesses.
std::optional<StateMap> constructor_action(const ReductionWitness& wa,
                                           const ReductionWitness& wb, const StateMap& f);

std::optional<StateMap> primitive_action(const std::string& ctor, const ReductionWitness& wa,
                                         const ReductionWitness& wb, const StateMap& f) {
    if (ctor == "identity" || ctor == "lts-to-wlts" || ctor == "wlts-to-ultras" ||
        ctor == "curry-to-wts" || ctor == "curry-from-wts")
        return f;
    if (ctor == "synthesize") {
        const std::size_t ka = wa.target.num_states() - wa.source.num_states();
        const std::size_t kb = wb.target.num_states() - wb.source.num_states();
        if (ka > kb)
            return std::nullopt;
        StateMap out;
        out.targets.reserve(wa.target.num_states());
        for (StateId x = 0; x < wa.source.num_states(); ++x)
            out.targets.push_back(f(x));
        for (std::size_t j = 0; j < ka; ++j)
            out.targets.push_back(static_cast<StateId>(wb.source.num_states() + j));
        return out;
    }
    return std::nullopt;
}

std::optional<StateMap> constructor_action(const ReductionWitness& wa,
                                           const ReductionWitness& wb, const StateMap& f) {
    if (!wa.stages.empty()) {
        if (wa.stages.size() != wb.stages.size())
            return std::nullopt;
        StateMap current = f;
        for (std::size_t i = 0; i < wa.stages.size(); ++i) {
            auto next = constructor_action(wa.stages[i], wb.stages[i], current);
            if (!next)
                return std::nullopt;
            current = std::move(*next);
        }
        return current;
    }
    return primitive_action(wa.constructor, wa, wb, f);
}

} // namespace

bool check_reduction_naturality(const ReductionWitness& wa, const ReductionWitness& wb,
                                const StateMap& f) {
    if (wa.constructor.empty() || wa.constructor != wb.constructor)
        throw TypeError("naturality check needs witnesses from one named constructor");
    if (!is_homomorphism(f, wa.source, wb.source))
        throw DomainError("naturality check: f is not a homomorphism of the sources");

    const auto action = constructor_action(wa, wb, f);
    if (!action)
        return false;
    // Square on the source carrier.
    for (StateId x = 0; x < wa.source.num_states(); ++x)
        if (wb.state_map(f(x)) != (*action)(wa.state_map(x)))
            return false;
    return is_homomorphism(*action, wa.target, wb.target);
}

} // namespace qred

#include "qred/cli.hpp"

#include "qred/reduct.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qred::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t max_states() {
    if (const char* env = std::getenv("QRED_MAX_STATES")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ParseError("QRED_MAX_STATES is not a number");
        }
    }
    return 10000;
}

System load_system(const std::string& path) {
    System s = parse_system(read_file(path));
    if (s.num_states() > max_states())
        throw LimitError("'" + path + "' exceeds QRED_MAX_STATES (" +
                         std::to_string(max_states()) + ")");
    return s;
}

TypeDescriptor load_descriptor(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("type"))
        return TypeDescriptor::from_json(j.at("type"));
    return TypeDescriptor::from_json(j);
}

struct Output {
    bool pretty = false;
    std::string path;

    void emit(const nlohmann::json& j, std::ostream& fallback) const {
        const std::string text = pretty ? j.dump(2) : j.dump();
        if (path.empty()) {
            fallback << text << "\n";
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ParseError("cannot write '" + path + "'");
        out << text << "\n";
    }
};

nlohmann::json fingerprint_json(const System& s, const Fingerprint& fp);

// Like nested_to_json, but renders approximant keys with their labels.
nlohmann::json nested_json_labelled(const System& s, const NestedWeight& nw) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, v] : nw.body().entries()) {
        nlohmann::json key;
        switch (k.kind()) {
        case WeightKey::Kind::State:
            key = s.state_name(k.state());
            break;
        case WeightKey::Kind::Nested:
            key = nested_json_labelled(s, k.nested());
            break;
        case WeightKey::Kind::Approximant:
            key = fingerprint_json(s, k.approximant());
            break;
        }
        arr.push_back(nlohmann::json::array({std::move(key), nw.stack()[0]->value_to_json(v)}));
    }
    return arr;
}

// Attaches component/label names to a fingerprint's flat slot list.
nlohmann::json fingerprint_json(const System& s, const Fingerprint& fp) {
    if (fp.depth() == 0)
        return "unit";
    nlohmann::json arr = nlohmann::json::array();
    std::size_t slot = 0;
    for (const auto& c : s.type().components) {
        nlohmann::json labelled = nlohmann::json::object();
        for (const auto& label : c.labels)
            labelled[label] = nested_json_labelled(s, fp.slots().at(slot++));
        arr.push_back(std::move(labelled));
    }
    return arr;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qred: bisimulation, minimization and reduction witnesses for "
                 "finite weighted transition systems"};
    app.require_subcommand(1);

    Output output;
    std::uint64_t seed = 0;
    std::size_t exhaustive_limit = 6;
    app.add_flag("--pretty", output.pretty, "indent JSON output");
    app.add_option("--seed", seed, "seed for sampled verification");
    app.add_option("--exhaustive-limit", exhaustive_limit,
                   "carrier bound for exhaustive bisimulation enumeration")
        ->default_val(6);
    app.add_option("-o", output.path, "write output to a file instead of stdout");

    auto* cmd_validate = app.add_subcommand("validate", "check a system file, report violations");
    std::string validate_file;
    cmd_validate->add_option("file", validate_file)->required();

    auto* cmd_bisim =
        app.add_subcommand("bisim", "largest bisimulation, or decide state bisimilarity");
    std::vector<std::string> bisim_files;
    std::string left_state, right_state;
    cmd_bisim->add_option("file", bisim_files, "one system, or two of the same type")
        ->required()
        ->expected(1, 2);
    cmd_bisim->add_option("--left", left_state);
    cmd_bisim->add_option("--right", right_state);

    auto* cmd_minimize = app.add_subcommand("minimize", "quotient by the largest bisimulation");
    std::string minimize_file;
    cmd_minimize->add_option("file", minimize_file)->required();

    auto* cmd_fingerprint =
        app.add_subcommand("fingerprint", "final-sequence approximant value of a state");
    std::string fingerprint_file, fingerprint_state;
    std::int64_t fingerprint_depth = -1;
    cmd_fingerprint->add_option("file", fingerprint_file)->required();
    cmd_fingerprint->add_option("--state", fingerprint_state)->required();
    cmd_fingerprint->add_option("--depth", fingerprint_depth, "defaults to |X|");

    auto* cmd_count =
        app.add_subcommand("count-approximants", "sizes of the finite final-sequence levels");
    std::size_t count_labels = 1, count_depth = 0;
    std::string count_monoid = "bool", count_descriptor;
    std::uint64_t count_budget = 1u << 20;
    cmd_count->add_option("--labels", count_labels, "label count for the one-component form");
    cmd_count->add_option("--monoid", count_monoid, "finite monoid name (bool)");
    cmd_count->add_option("--descriptor", count_descriptor, "type descriptor file");
    cmd_count->add_option("--depth", count_depth)->required();
    cmd_count->add_option("--budget", count_budget, "enumeration size guard");

    auto* cmd_reduce = app.add_subcommand("reduce", "construct a reduction witness");
    std::string reduce_file, reduce_to;
    bool reduce_drop_zero = false;
    cmd_reduce->add_option("file", reduce_file)->required();
    cmd_reduce->add_option("--to", reduce_to, "wlts | ultras | wts | synth:<descriptor-file>")
        ->required();
    cmd_reduce->add_flag("--drop-zero", reduce_drop_zero,
                         "ultras cast: drop zero entries instead of wrapping them");

    auto* cmd_verify = app.add_subcommand("verify-reduction", "check a witness file");
    std::string verify_file;
    cmd_verify->add_option("file", verify_file)->required();

    auto* cmd_compose = app.add_subcommand("compose", "compose two witness files");
    std::vector<std::string> compose_files;
    cmd_compose->add_option("files", compose_files)->required()->expected(2);

    // Let --pretty / --seed / -o appear after the subcommand as well.
    for (auto* sub : app.get_subcommands(nullptr))
        sub->fallthrough();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*cmd_validate) {
            const auto report = validate_system_text(read_file(validate_file));
            output.emit(report.to_json(), out);
            return report.ok() ? 0 : 1;
        }

        if (*cmd_bisim) {
            if (bisim_files.size() == 1 && left_state.empty() && right_state.empty()) {
                const System s = load_system(bisim_files[0]);
                output.emit(largest_bisimulation(s).to_json(s), out);
                return 0;
            }
            if (left_state.empty() || right_state.empty())
                throw ParseError("bisim needs both --left and --right (or neither)");
            const System s1 = load_system(bisim_files[0]);
            const System s2 = bisim_files.size() == 2 ? load_system(bisim_files[1]) : s1;
            const bool result = bisimilar(s1, left_state, s2, right_state);
            output.emit(nlohmann::json{{"bisimilar", result}}, out);
            return result ? 0 : 1;
        }

        if (*cmd_minimize) {
            const System s = load_system(minimize_file);
            auto q = quotient_system(s, largest_bisimulation(s));
            output.emit(system_to_json(q.system), out);
            return 0;
        }

        if (*cmd_fingerprint) {
            const System s = load_system(fingerprint_file);
            const StateId x = s.state_index(fingerprint_state);
            const std::size_t depth =
                fingerprint_depth < 0 ? s.num_states() : static_cast<std::size_t>(fingerprint_depth);
            const auto fp = fingerprint(s, x, depth);
            output.emit(nlohmann::json{{"state", fingerprint_state},
                                       {"depth", depth},
                                       {"fingerprint", fingerprint_json(s, *fp)}},
                        out);
            return 0;
        }

        if (*cmd_count) {
            TypeDescriptor t;
            if (!count_descriptor.empty()) {
                t = load_descriptor(count_descriptor);
            } else {
                if (count_monoid != "bool")
                    throw ParseError("count-approximants supports --monoid bool; use "
                                     "--descriptor for other finite monoids");
                std::vector<std::string> labels;
                for (std::size_t i = 0; i < count_labels; ++i)
                    labels.push_back("a" + std::to_string(i));
                t = wlts_type(std::move(labels), Monoid::bool_or());
            }
            output.emit(nlohmann::json(count_approximants(t, count_depth, count_budget)), out);
            return 0;
        }

        if (*cmd_reduce) {
            const System s = load_system(reduce_file);
            const ReductionWitness w = [&]() -> ReductionWitness {
                if (reduce_to == "wts")
                    return curry_reduction(s, CurryDirection::ToWts);
                if (reduce_to == "ultras")
                    return wlts_to_ultras(s, reduce_drop_zero);
                if (reduce_to == "wlts") {
                    if (is_wts_view(s) &&
                        s.type().components[0].stack[0]->kind() == MonoidKind::Power)
                        return curry_reduction(s, CurryDirection::FromWts);
                    if (is_lts_view(s))
                        return lts_to_wlts(s);
                    throw TypeError("reduce --to wlts needs an LTS or a one-label system "
                                    "over a power monoid");
                }
                if (reduce_to.rfind("synth:", 0) == 0)
                    return synthesize_reduction(s, load_descriptor(reduce_to.substr(6)));
                throw ParseError("unknown reduction target '" + reduce_to + "'");
            }();
            output.emit(w.to_json(), out);
            return 0;
        }

        if (*cmd_verify) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(verify_file));
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("invalid JSON: ") + e.what());
            }
            const auto w = ReductionWitness::from_json(j);
            VerifyOptions opts;
            opts.exhaustive_limit = exhaustive_limit;
            opts.seed = seed;
            const auto report = verify_system_reduction(w, opts);
            output.emit(report.to_json(), out);
            return report.pass ? 0 : 1;
        }

        if (*cmd_compose) {
            auto parse_witness = [&](const std::string& path) {
                try {
                    return ReductionWitness::from_json(nlohmann::json::parse(read_file(path)));
                } catch (const nlohmann::json::exception& e) {
                    throw ParseError(std::string("invalid JSON: ") + e.what());
                }
            };
            const auto w1 = parse_witness(compose_files[0]);
            const auto w2 = parse_witness(compose_files[1]);
            output.emit(compose_reductions(w1, w2).to_json(), out);
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

} // namespace qred::cli

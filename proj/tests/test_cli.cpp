#include "qred/cli.hpp"

#include "qred/reduct.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace qred;
namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return nlohmann::json::parse(buf.str());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qred-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

const char* kNatExample = R"({
  "type": [ { "labels": ["a"], "stack": [{"kind":"nat-plus"}] } ],
  "states": ["x","x2","y1","y2"],
  "trans": [
    { "from":"x",  "comp":0, "label":"a", "weight": [["y1","1"],["y2","1"]] },
    { "from":"x2", "comp":0, "label":"a", "weight": [["y1","1"]] }
  ]
})";

} // namespace

TEST_CASE("bisim decides state pairs with documented exit codes") {
    TempDir dir;
    const auto sys = dir.file("sys.json", kNatExample);

    const auto different = run({"bisim", sys, "--left", "x", "--right", "x2"});
    CHECK(different.code == 1);
    CHECK(different.out == "{\"bisimilar\":false}\n");

    const auto same = run({"bisim", sys, "--left", "y1", "--right", "y2"});
    CHECK(same.code == 0);
    CHECK(same.out == "{\"bisimilar\":true}\n");

    // without a pair: the largest bisimulation as a partition
    const auto partition = run({"bisim", sys});
    CHECK(partition.code == 0);
    CHECK(partition.out == "[[\"x\"],[\"x2\"],[\"y1\",\"y2\"]]\n");

    // identical inputs give byte-identical output
    CHECK(run({"bisim", sys}).out == partition.out);
}

TEST_CASE("bisim works across two files of one type") {
    TempDir dir;
    const auto a = dir.file("a.json", kNatExample);
    const auto b = dir.file("b.json", kNatExample);
    CHECK(run({"bisim", a, b, "--left", "x", "--right", "x"}).code == 0);
    CHECK(run({"bisim", a, b, "--left", "x", "--right", "x2"}).code == 1);
}

TEST_CASE("minimize emits a loadable canonical system") {
    TempDir dir;
    const auto sys = dir.file("sys.json", kNatExample);
    const auto min = run({"minimize", sys});
    CHECK(min.code == 0);

    const System m = parse_system(min.out);
    CHECK(m.num_states() == 3);
    CHECK(largest_bisimulation(m) == Partition::discrete(3));
}

TEST_CASE("validate reports violations with exit 1") {
    TempDir dir;
    const auto good = dir.file("good.json", kNatExample);
    CHECK(run({"validate", good}).code == 0);

    const auto bad = dir.file("bad.json", R"({
      "type": [ { "labels": ["a"], "stack": [{"kind":"nat-plus"}] } ],
      "states": ["x"],
      "trans": [ { "from":"x", "comp":0, "label":"a", "weight": [["ghost","1"]] } ] })");
    const auto res = run({"validate", bad});
    CHECK(res.code == 1);
    CHECK(res.out.find("ghost") != std::string::npos);

    const auto junk = dir.file("junk.json", "not json");
    CHECK(run({"validate", junk}).code == 2);
    CHECK(run({"validate", (dir.path / "missing.json").string()}).code == 2);
}

TEST_CASE("count-approximants prints the level sizes") {
    const auto res = run({"count-approximants", "--labels", "1", "--monoid", "bool",
                          "--depth", "3"});
    CHECK(res.code == 0);
    CHECK(res.out == "[1,2,4,16]\n");

    CHECK(run({"count-approximants", "--labels", "2", "--monoid", "bool", "--depth", "3"})
              .code == 2); // budget guard
}

TEST_CASE("fingerprint defaults to depth |X|") {
    TempDir dir;
    const auto sys = dir.file("sys.json", kNatExample);
    const auto res = run({"fingerprint", sys, "--state", "y1"});
    CHECK(res.code == 0);
    CHECK(res.out.find("\"depth\":4") != std::string::npos);
    CHECK(run({"fingerprint", sys, "--state", "nope"}).code == 2);
}

TEST_CASE("reduce, verify-reduction and compose round trip through files") {
    TempDir dir;
    const auto sys = dir.file("sys.json", kNatExample);

    const auto wts = run({"reduce", sys, "--to", "wts", "-o", (dir.path / "w.json").string()});
    REQUIRE(wts.code == 0);
    const auto verify = run({"verify-reduction", (dir.path / "w.json").string()});
    CHECK(verify.code == 0);
    CHECK(verify.out.find("\"pass\":true") != std::string::npos);

    // ULTraS cast then a synthesized reduction, composed via files
    const auto u = run({"reduce", sys, "--to", "ultras", "-o", (dir.path / "u.json").string()});
    REQUIRE(u.code == 0);
    const auto witness = ReductionWitness::from_json(read_json(dir.path / "u.json"));
    const auto desc = dir.file("desc.json",
                               R"({"type":[{"labels":["l"],"stack":[{"kind":"nat-plus"}]}]})");
    const auto mid = dir.file("mid.json", serialize_system(witness.target));
    REQUIRE(run({"reduce", mid, "--to", "synth:" + desc, "-o",
                 (dir.path / "s.json").string()})
                .code == 0);
    const auto composed = run({"compose", (dir.path / "u.json").string(),
                               (dir.path / "s.json").string(), "-o",
                               (dir.path / "c.json").string()});
    REQUIRE(composed.code == 0);
    CHECK(run({"verify-reduction", (dir.path / "c.json").string()}).code == 0);

    // corrupting the witness flips the verdict
    auto j = read_json(dir.path / "w.json");
    j["sigma_c"]["x2"] = j["sigma_c"]["x"];
    const auto broken = dir.file("broken.json", j.dump());
    const auto fail = run({"verify-reduction", broken});
    CHECK(fail.code == 1);
    CHECK(fail.out.find("\"pass\":false") != std::string::npos);
}

TEST_CASE("reduce dispatches --to wlts by view") {
    TempDir dir;
    const auto lts = dir.file("lts.json", R"({
      "type": [ { "labels": ["a"], "stack": [{"kind":"bool-or"}] } ],
      "states": ["x","y"],
      "trans": [ { "from":"x", "comp":0, "label":"a", "weight": [["y","tt"]] } ] })");
    CHECK(run({"reduce", lts, "--to", "wlts"}).code == 0);

    // WTS over a power monoid uncurries back to a WLTS
    const auto sys = dir.file("sys.json", kNatExample);
    REQUIRE(run({"reduce", sys, "--to", "wts", "-o", (dir.path / "w.json").string()}).code == 0);
    const auto witness = ReductionWitness::from_json(read_json(dir.path / "w.json"));
    const auto wts_file = dir.file("wts.json", serialize_system(witness.target));
    const auto back = run({"reduce", wts_file, "--to", "wlts"});
    CHECK(back.code == 0);
    const auto back_witness = ReductionWitness::from_json(nlohmann::json::parse(back.out));
    CHECK(back_witness.target == parse_system(kNatExample));

    CHECK(run({"reduce", sys, "--to", "nonsense"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus-subcommand"}).code == 2);
    CHECK(run({"bisim"}).code == 2);
}

TEST_CASE("QRED_MAX_STATES caps the carrier") {
    TempDir dir;
    const auto sys = dir.file("sys.json", kNatExample);
    setenv("QRED_MAX_STATES", "2", 1);
    CHECK(run({"bisim", sys}).code == 2);
    unsetenv("QRED_MAX_STATES");
    CHECK(run({"bisim", sys}).code == 0);
}

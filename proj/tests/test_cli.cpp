#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = GROUPFORM_CLI;
const std::string kData = GROUPFORM_DATA_DIR;

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = "'" + kCli + "' " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path temp_dir(const char* name) {
    auto p = fs::temp_directory_path() / ("groupform_cli_" + std::string(name));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string kExample = "'" + kData + "/example2.json'";

}  // namespace

TEST_CASE("simulate writes a trace and prints metrics") {
    const auto dir = temp_dir("sim");
    const auto r = run("simulate --scenario " + kExample + " --seed 7 --out " + q(dir));
    CHECK(r.code == 0);
    CHECK(r.out.find("\"num_groups\":6") != std::string::npos);
    CHECK(slurp(dir / "trace.jsonl") == slurp(kData + "/golden/example2_seed7.jsonl"));

    const auto dir2 = temp_dir("sim2");
    CHECK(run("simulate --scenario " + kExample + " --seed 7 --out " + q(dir2)).code == 0);
    CHECK(slurp(dir / "trace.jsonl") == slurp(dir2 / "trace.jsonl"));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("simulate exit codes") {
    const auto dir = temp_dir("simcodes");
    const auto r = run("simulate --scenario " + kExample + " --max-iterations 1 --out " + q(dir));
    CHECK(r.code == 3);
    const auto trace = slurp(dir / "trace.jsonl");
    CHECK(trace.find("\"converged\":false") != std::string::npos);

    CHECK(run("simulate --scenario " + q(dir / "missing.json")).code == 5);

    std::ofstream(dir / "bad.json")
        << R"({"format_version":1,"k":3,"agents":[{"id":0,"category":0,"resource":-1,"x":0,"y":0}]})";
    CHECK(run("simulate --scenario " + q(dir / "bad.json") + " --out " + q(dir)).code == 2);

    CHECK(run("simulate --scenario " + kExample + " --k 4 --out " + q(dir)).code == 2);
    CHECK(run("simulate").code == 1);
    CHECK(run("simulate --scenario " + kExample + " --bogus").code == 1);
    CHECK(run("frobnicate").code == 1);
    fs::remove_all(dir);
}

TEST_CASE("generate then simulate") {
    const auto dir = temp_dir("gen");
    CHECK(run("generate --m 3 --seed 5 --x-max 4 --r-max 10 --out " + q(dir / "s.json")).code == 0);
    const auto text = slurp(dir / "s.json");
    CHECK(text.find("\"provenance\"") != std::string::npos);
    CHECK(run("simulate --scenario " + q(dir / "s.json") + " --out " + q(dir)).code == 0);
    CHECK(run("generate --r-max 0.5 --out " + q(dir / "x.json")).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("verify") {
    const auto dir = temp_dir("verify");
    std::ofstream(dir / "singletons.json")
        << R"({"format_version":1,"groups":[[0],[1],[2],[3],[4],[5],[6],[7],[8]]})";
    auto r = run("verify --scenario " + kExample + " --partition " + q(dir / "singletons.json"));
    CHECK(r.code == 4);
    CHECK(r.out.find("\"is_ise\":false") != std::string::npos);

    std::ofstream(dir / "eq.json")
        << R"({"format_version":1,"groups":[[0,6],[1],[2],[3,8],[4],[5,7]]})";
    r = run("verify --scenario " + kExample + " --partition " + q(dir / "eq.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("\"is_ise\":true") != std::string::npos);

    std::ofstream(dir / "unknown.json") << R"({"format_version":1,"groups":[[0,1,2,3,4,5,6,7,99]]})";
    CHECK(run("verify --scenario " + kExample + " --partition " + q(dir / "unknown.json")).code == 2);

    CHECK(run("verify --scenario " + kExample + " --trace '" + kData +
              "/golden/example2_seed7.jsonl'")
              .code == 0);
    CHECK(run("verify --scenario " + kExample).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("render") {
    const auto dir = temp_dir("render");
    const std::string trace = "'" + kData + "/golden/example2_seed7.jsonl'";
    CHECK(run("render --trace " + trace + " --keyframes --out " + q(dir / "a")).code == 0);
    CHECK(fs::exists(dir / "a" / "iteration_0000.svg"));
    CHECK(fs::exists(dir / "a" / "iteration_0013.svg"));
    CHECK(run("render --trace " + trace + " --out " + q(dir / "b")).code == 0);
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
    }
    CHECK(run("render --trace " + trace + " --iterations 0,5 --out " + q(dir / "c")).code == 0);
    CHECK(fs::exists(dir / "c" / "iteration_0005.svg"));
    CHECK(run("render --trace " + trace + " --iterations 500 --out " + q(dir / "d")).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("replay") {
    const std::string trace = "'" + kData + "/golden/example2_seed7.jsonl'";
    auto r = run("replay --trace " + trace + " --scenario " + kExample);
    CHECK(r.code == 0);
    CHECK(r.out.find("\"identical\":true") != std::string::npos);

    const auto dir = temp_dir("replay");
    std::ofstream(dir / "other.json")
        << R"({"format_version":1,"k":3,"agents":[{"id":0,"category":0,"resource":1,"x":0,"y":0}]})";
    CHECK(run("replay --trace " + trace + " --scenario " + q(dir / "other.json")).code == 6);
    fs::remove_all(dir);
}

TEST_CASE("sweep") {
    const auto dir = temp_dir("sweep");
    const auto r = run("sweep --x-max 1,20 --r-max 1,40 --replications 4 --threads 2 --out " +
                       q(dir / "a"));
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "a" / "sweep.csv"));
    CHECK(fs::exists(dir / "a" / "sweep.json"));
    CHECK(r.out.find("mean_group_size_vs_r_max") != std::string::npos);

    CHECK(run("sweep --x-max 1,20 --r-max 1,40 --replications 4 --threads 1 --out " +
              q(dir / "b"))
              .code == 0);
    CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));
    CHECK(slurp(dir / "a" / "sweep.json") == slurp(dir / "b" / "sweep.json"));

    const auto single = run("sweep --x-max 1 --r-max 1 --replications 2 --out " + q(dir / "c"));
    CHECK(single.code == 0);
    CHECK(single.out.find("null") != std::string::npos);
    fs::remove_all(dir);
}

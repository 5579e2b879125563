// Runs the command-line tool and checks exit codes and outputs.

#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("toda_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const std::string& env = "")
{
    const std::string cmd = "cd '" + workdir().string() + "' && " + env + " '" TODA_CLI_PATH "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name)
{
    std::ifstream in(workdir() / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& name, const std::string& text) { std::ofstream(workdir() / name) << text; }

} // namespace

TEST_CASE("usage errors exit with 2")
{
    CHECK(run("") == 2);
    CHECK(run("teleport") == 2);
    CHECK(run("verify --n") == 2);
    CHECK(run("verify --suite quantum") == 2);
    CHECK(run("verify --config missing.json") == 2);
    write("bad.json", "{\"n\": 3,\n \"seed\": }");
    CHECK(run("verify --config bad.json") == 2);
    CHECK(slurp("stderr.txt").find("parse error at byte") != std::string::npos);
    CHECK(run("verify --n 2", "TODA_LAX_THREADS=lots") == 2);
    CHECK(run("singular --n 3 --target even:1") == 2);
    CHECK(run("integrate --q 1,2 --p 0,0,0 --coeffs 0,1") == 2);
    CHECK(run("integrate --q 1,x --p 0,0 --coeffs 0,1") == 2);
    CHECK(run("maslov") == 2);
}

TEST_CASE("verify passes on a small config and is reproducible")
{
    write("small.json", "{\"n_min\": 2, \"n_max\": 3, \"random_points\": 25, \"seed\": 5}");
    CHECK(run("verify --config small.json --out a.json", "TODA_LAX_THREADS=1") == 0);
    CHECK(run("verify --config small.json --out b.json", "TODA_LAX_THREADS=4") == 0);
    CHECK(slurp("a.json") == slurp("b.json"));
    CHECK(slurp("a.json").find("\"fail\": 0") != std::string::npos);
    CHECK(run("verify --config small.json --seed 6 --out c.json") == 0);
    CHECK(slurp("c.json") != slurp("a.json"));
}

TEST_CASE("inconclusive checks warn but pass")
{
    CHECK(run("verify --n 3 --suite singularity --tol.rank_tol 1 --random-points 10") == 0);
    CHECK(slurp("stderr.txt").find("inconclusive") != std::string::npos);
}

TEST_CASE("check failures exit with 1")
{
    CHECK(run("verify --n 3 --suite dynamics --tol.ode_rtol 1e-3 --random-points 10") == 1);
    CHECK(slurp("stdout.txt").find("\"status\": \"fail\"") != std::string::npos);
}

TEST_CASE("singular and maslov commands")
{
    CHECK(run("singular --n 4 --target odd:1 --target odd:3 --target even:2 --out s4.json") == 0);
    const std::string s4 = slurp("s4.json");
    CHECK(s4.find("odd:3") != std::string::npos);
    CHECK(run("singular --n 3 --target even:2 --out s3.json") == 0);
    write("circle.json", "{\"type\": \"circle\", \"center\": {\"singular_file\": \"s3.json\", \"index\": 0}, "
                         "\"radius\": 0.001}");
    CHECK(run("maslov --curve circle.json --trace trace.csv --out m.json") == 0);
    CHECK(slurp("m.json").find("\"mu\": -2") != std::string::npos);
    CHECK(slurp("trace.csv").rfind("t,phase\n", 0) == 0);
    write("seed.json", "{\"q\": [5, -3, 0.2], \"p\": [4, -4, 1]}");
    CHECK(run("singular --n 3 --target even:2 --seed-point seed.json --max-iter 4") == 1);
    CHECK(run("maslov --curve-json '{\"type\": \"circle\", \"center\": {\"omega\": {\"n\": 3}}, \"pair\": "
              "\"odd:1\", \"radius\": 1e-12}'") == 1);
}

TEST_CASE("integrate command")
{
    CHECK(run("integrate --q 0.1,0.2,0.3 --p 0.3,-0.1,0 --coeffs 0,1,0 --t-final 2 --samples 5 --out t.csv "
              "--summary s.json") == 0);
    const std::string csv = slurp("t.csv");
    CHECK(csv.rfind("t,q_1,q_2,q_3,p_1,p_2,p_3,F_1,F_2,F_3\n", 0) == 0);
    CHECK(slurp("s.json").find("integral_drift") != std::string::npos);
    CHECK(run("integrate --q 0.1,0.2 --p 0,0 --coeffs 0,0,1 --method verlet") == 2);
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::filesystem::path scratch = std::filesystem::temp_directory_path() / "uhho_cli_test";

int run(const std::string& args)
{
    std::filesystem::create_directories(scratch);
    const std::string cmd = std::string("\"") + UHHO_CLI + "\" " + args + " > \"" + (scratch / "out.txt").string() +
                            "\" 2> \"" + (scratch / "err.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("successful solve prints the CSV header and one row")
{
    CHECK(run("solve --case sinsin --k 1 --level 0 --r 4 --deterministic") == 0);
    const std::string out = slurp(scratch / "out.txt");
    CHECK(out.rfind("case,k,level,r,theta,eta,kappa2,ndofs,energy_error,rate,cond,wall_time_s\n", 0) == 0);
    CHECK(out.find("\nsinsin,1,0,4,") != std::string::npos);
}

TEST_CASE("help exits cleanly")
{
    CHECK(run("--help") == 0);
    CHECK(run("study convergence --help") == 0);
}

TEST_CASE("configuration errors exit with 2")
{
    CHECK(run("solve --case nope --k 1 --level 0") == 2);
    CHECK(slurp(scratch / "err.txt").find("sinsin") != std::string::npos);
    CHECK(run("solve --k 1 --level 0") == 2);
    CHECK(run("solve --case sinsin --k 1 --level 0 --r 20") == 2);
    CHECK(run("solve --case sinsin --k 9 --level 0") == 2);
    CHECK(run("study convergence --case sinsin --k 0..x") == 2);
    CHECK(run("solve --case sinsin --k 1 --level 0 --solver magic") == 2);
}

TEST_CASE("numerical failures exit with 3")
{
    CHECK(run("solve --case sinsin --k 1 --level 0 --r 4 --theta 5") == 3);
    CHECK(slurp(scratch / "err.txt").find("ill-cut") != std::string::npos);
    CHECK(run("study convergence --case sinsin --k 0 --levels 0 --r 4 --theta 5 --deterministic") == 3);
}

TEST_CASE("cut dump and matrix export")
{
    const auto svg = scratch / "cuts.svg";
    const auto mtx = scratch / "a.mtx";
    CHECK(run("solve --case sinsin --k 0 --level 0 --r 3 --dump-cuts \"" + svg.string() + "\" --export-matrix \"" +
              mtx.string() + "\"") == 0);
    CHECK(slurp(svg).find("<svg") != std::string::npos);
    CHECK(slurp(mtx).rfind("%%MatrixMarket", 0) == 0);
    std::filesystem::remove_all(scratch);
}

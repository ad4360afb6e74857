#include <doctest.h>

#include "fbnl/config.hpp"
#include "fbnl/output.hpp"

#include "fbnl/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fbnl;
using namespace fbnl::cli;
namespace fs = std::filesystem;

TEST_CASE("config sections, comments and defaults")
{
    const Config c = Config::parse("out = here\n# comment\n[params]\ns = 0.3  # trailing\n"
                                   "gamma=0.2\n[sweep]\nradii = 0.1, 0.2,0.3\nflag = yes\n",
                                   "inline");
    CHECK(c.str("run.out", "") == "here");
    CHECK(c.real("params.s", 0.0) == 0.3);
    CHECK(c.real("params.gamma", 0.0) == 0.2);
    CHECK(c.real("params.missing", 7.0) == 7.0);
    CHECK(c.reals("sweep.radii", {}) == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(c.flag("sweep.flag", false));
}

TEST_CASE("config overrides")
{
    Config c = Config::parse("[grid]\nnx = 64\n", "inline");
    c.set_override("grid.nx=128");
    c.set_override("out=elsewhere");
    CHECK(c.integer("grid.nx", 0) == 128);
    CHECK(c.str("run.out", "") == "elsewhere");
    CHECK_THROWS_AS(c.set_override("novalue"), ParameterError);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(Config::parse("[broken\n", "x"), ParameterError);
    CHECK_THROWS_AS(Config::parse("just words\n", "x"), ParameterError);
    const Config c = Config::parse("a = nan\nb = 1.5\nc = maybe\n", "x");
    CHECK_THROWS_AS(c.real("run.a", 0.0), ParameterError);
    CHECK_THROWS_AS(c.integer("run.b", 0), ParameterError);
    CHECK_THROWS_AS(c.flag("run.c", false), ParameterError);
    CHECK_THROWS_AS(Config::load("/nonexistent/fbnl.cfg"), ParameterError);
}

TEST_CASE("canonical text is order independent")
{
    const Config a = Config::parse("[x]\nb = 2\na = 1\n", "a");
    const Config b = Config::parse("[x]\na = 1\nb = 2\n", "b");
    CHECK(a.canonical() == b.canonical());
}

TEST_CASE("FNV-1a 64 reference vectors")
{
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a("foobar")) == "85944171f73967e8");
}

TEST_CASE("num17 round-trips doubles")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23})
        CHECK(std::stod(num17(v)) == v);
}

TEST_CASE("run output: lock, checksums, manifest")
{
    const fs::path dir = fs::temp_directory_path() / "fbnl_test_output";
    fs::remove_all(dir);
    {
        RunOutput out(dir.string(), "unit");
        CHECK_THROWS_AS(RunOutput(dir.string(), "second"), ParameterError);
        out.write("a.txt", "foobar", "test");
        out.add_check("trivial", true, 0.0, 1.0, "test");
        out.finish(Config{}, derive_exponents(0.5, 0.5), nlohmann::json::object(), 1);
    }
    CHECK_FALSE(fs::exists(dir / ".fbnl.lock"));
    std::ifstream is(dir / "manifest.json");
    const nlohmann::json m = nlohmann::json::parse(is);
    CHECK(m["command"] == "unit");
    CHECK(m["outputs"][0]["fnv1a64"] == "85944171f73967e8");
    CHECK(m["outputs"][0]["bytes"] == 6);
    CHECK(m["checks"][0]["pass"] == true);
    fs::remove_all(dir);
}

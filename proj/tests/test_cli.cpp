#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#ifndef WIREHOM_CLI_PATH
#error "WIREHOM_CLI_PATH must point at the built command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + WIREHOM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

struct Workspace {
  fs::path dir;
  Workspace() : dir("/tmp/wirehom_cli_test") {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << content;
    return p;
  }
};

}  // namespace

TEST_CASE("command line usage errors exit with status 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("no-such-task --config /dev/null") == 2);
  CHECK(run_cli("classify") == 2);  // --config is required
  CHECK(run_cli("classify --config /tmp/wirehom_missing_config.cfg") == 2);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("classify subcommand produces a verdict and a manifest") {
  const Workspace ws;
  const fs::path cfg = ws.write("polarizing.cfg",
                                "[law]\n"
                                "radius_type = power\n"
                                "p = 2\n");
  const fs::path out = ws.dir / "out";
  CHECK(run_cli("classify --config " + cfg.string() + " --out " + out.string()) == 0);

  REQUIRE(fs::exists(out / "verdict.json"));
  REQUIRE(fs::exists(out / "manifest.json"));

  std::ifstream vin(out / "verdict.json");
  const nlohmann::json verdict = nlohmann::json::parse(vin);
  CHECK(verdict.at("kind").get<std::string>() == "PolarizingE1");

  std::ifstream min(out / "manifest.json");
  const nlohmann::json manifest = nlohmann::json::parse(min);
  CHECK(manifest.at("task").get<std::string>() == "classify");
}

TEST_CASE("scatter subcommand writes its artifacts and passes its checks") {
  const Workspace ws;
  const fs::path cfg = ws.write("fresnel.cfg",
                                "task = scatter\n"
                                "[media]\n"
                                "eps_plus = 4\n"
                                "[scatter]\n"
                                "kind = Inactive\n"
                                "samples = 11\n");
  const fs::path out = ws.dir / "out";
  CHECK(run_cli("scatter --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "scattering.csv"));
  CHECK(fs::exists(out / "field_profile.csv"));
  CHECK(fs::exists(out / "summary.txt"));
}

TEST_CASE("config content errors exit with status 2") {
  const Workspace ws;

  // Task name in the file contradicting the subcommand is a config error.
  const fs::path mismatched = ws.write("mismatch.cfg", "task = scatter\n");
  CHECK(run_cli("classify --config " + mismatched.string() + " --out " +
                (ws.dir / "o1").string()) == 2);

  // Unknown radius law type.
  const fs::path bad_law = ws.write("badlaw.cfg",
                                    "[law]\n"
                                    "radius_type = cubic\n");
  CHECK(run_cli("classify --config " + bad_law.string() + " --out " +
                (ws.dir / "o2").string()) == 2);

  // Malformed syntax (missing '=').
  const fs::path bad_syntax = ws.write("badsyntax.cfg", "just-a-token\n");
  CHECK(run_cli("classify --config " + bad_syntax.string() + " --out " +
                (ws.dir / "o3").string()) == 2);
}

#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rldt_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(RLDT_CLI) + " " + args + " >" + (log / "stdout").string() +
                          " 2>" + (log / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// label = x0 over three binary features, with a 3:1 class imbalance via x0.
fs::path write_dataset(const fs::path& dir) {
  std::ofstream csv(dir / "d.csv");
  csv << "x0,x1,x2,y\n";
  for (int i = 0; i < 400; ++i) {
    const int x0 = i % 4 == 0 ? 1 : 0;
    csv << (x0 ? "b" : "a") << ',' << ((i / 2) % 2 ? "p" : "q") << ',' << ((i / 3) % 2 ? "u" : "v")
        << ',' << (x0 ? "yes" : "no") << "\n";
  }
  std::ofstream schema(dir / "d.schema.json");
  schema << R"({"class_column": "y", "class_values": ["no", "yes"]})";
  return dir / "d.csv";
}

std::string data_flags(const fs::path& dir) {
  return "--data " + (dir / "d.csv").string() + " --schema " + (dir / "d.schema.json").string();
}

}  // namespace

TEST_CASE("run is byte-identical across invocations") {
  const auto dir = scratch("determinism");
  write_dataset(dir);
  const auto flags = data_flags(dir) + " --runs 2 --seed 7";
  REQUIRE(run("run " + flags + " --out " + (dir / "a").string(), dir) == 0);
  REQUIRE(run("run " + flags + " --jobs 2 --out " + (dir / "b").string(), dir) == 0);
  REQUIRE(run("run --config " + (dir / "a" / "summary.json").string() + " --out " + (dir / "c").string(), dir) == 0);
  for (const char* f : {"metrics_run0.csv", "metrics_run1.csv", "summary.json", "tree.txt",
                        "tree.dot", "qtable_run0.tsv", "cuts.json"}) {
    CAPTURE(f);
    const auto a = slurp(dir / "a" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / f));
    CHECK(a == slurp(dir / "c" / f));
  }
}

TEST_CASE("zero queries learns the majority class") {
  const auto dir = scratch("majority");
  write_dataset(dir);
  REQUIRE(run("run " + data_flags(dir) + " --runs 1 --ordered --max-queries 0 --terminal 200 --out " +
                  (dir / "o").string(),
              dir) == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
  // Ordered file: every fourth point is the minority class.
  CHECK(summary["terminal"]["accuracy"]["mean"].get<double>() == doctest::Approx(0.75));
  CHECK(summary["terminal"]["queries"]["mean"].get<double>() == 0.0);
}

TEST_CASE("errors are one line and leave no outputs") {
  const auto dir = scratch("errors");
  write_dataset(dir);
  CHECK(run("run --data " + (dir / "missing.csv").string() + " --schema x --out " + (dir / "o").string(), dir) != 0);
  const auto err = slurp(dir / "stderr");
  CHECK(err.rfind("error: ", 0) == 0);
  CHECK(err.find('\n') == err.size() - 1);
  CHECK_FALSE(fs::exists(dir / "o"));
  CHECK(run("run " + data_flags(dir) + " --gamma 2 --out " + (dir / "o").string(), dir) != 0);
  CHECK_FALSE(fs::exists(dir / "o"));
  CHECK(run("sweep " + data_flags(dir) + " --param gamma --values \"\" --out " + (dir / "o").string(), dir) != 0);
  CHECK(run("sweep " + data_flags(dir) + " --param colour --values 1 --out " + (dir / "o").string(), dir) != 0);
  CHECK(run("frobnicate", dir) != 0);
}

TEST_CASE("sweep over query cost") {
  const auto dir = scratch("sweep");
  write_dataset(dir);
  REQUIRE(run("sweep " + data_flags(dir) + " --runs 3 --param query_cost_uniform --values 0,3 --out " +
                  (dir / "o").string(),
              dir) == 0);
  std::istringstream table(slurp(dir / "o" / "sweep.csv"));
  std::string line;
  std::getline(table, line);  // config comment
  std::getline(table, line);
  CHECK(line.rfind("value,runs,acc_mean", 0) == 0);
  std::vector<double> queries;
  while (std::getline(table, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    queries.push_back(std::stod(cols.at(4)));
  }
  REQUIRE(queries.size() == 2);
  CHECK(queries[1] <= queries[0]);
  CHECK(fs::exists(dir / "o" / "sweep_curves.csv"));
}

TEST_CASE("export-tree from fresh and trained dumps") {
  const auto dir = scratch("export");
  write_dataset(dir);
  {
    std::ofstream empty(dir / "empty.tsv");
    empty << "# rldt-qtable features=3 classes=2 max_queries=3 q_optimistic=8 r_init=0\n";
  }
  REQUIRE(run("export-tree " + data_flags(dir) + " --qtable " + (dir / "empty.tsv").string() +
                  " --out " + (dir / "e").string(),
              dir) == 0);
  CHECK(slurp(dir / "e" / "tree.txt") == "report no\n");

  REQUIRE(run("run " + data_flags(dir) + " --runs 1 --out " + (dir / "r").string(), dir) == 0);
  REQUIRE(run("export-tree " + data_flags(dir) + " --qtable " + (dir / "r" / "qtable_run0.tsv").string() +
                  " --out " + (dir / "x1").string(),
              dir) == 0);
  REQUIRE(run("export-tree " + data_flags(dir) + " --qtable " + (dir / "x1" / "qtable.tsv").string() +
                  " --out " + (dir / "x2").string(),
              dir) == 0);
  CHECK(slurp(dir / "x1" / "qtable.tsv") == slurp(dir / "r" / "qtable_run0.tsv"));
  CHECK(slurp(dir / "x1" / "tree.txt") == slurp(dir / "x2" / "tree.txt"));
  CHECK(slurp(dir / "x1" / "tree.dot") == slurp(dir / "x2" / "tree.dot"));
  CHECK(slurp(dir / "x1" / "tree.txt") == slurp(dir / "r" / "tree.txt"));

  {
    std::ofstream bad(dir / "bad.tsv");
    bad << "nonsense\n";
  }
  CHECK(run("export-tree " + data_flags(dir) + " --qtable " + (dir / "bad.tsv").string() +
                " --out " + (dir / "b").string(),
            dir) != 0);
}

TEST_CASE("baseline accuracy report") {
  const auto dir = scratch("baseline");
  write_dataset(dir);
  REQUIRE(run("baseline " + data_flags(dir) + " --max-depth 1 --out " + (dir / "o").string(), dir) == 0);
  auto j = nlohmann::json::parse(slurp(dir / "o" / "baseline.json"));
  CHECK(j["greedy"]["accuracy"]["mean"].get<double>() == 1.0);
  REQUIRE(run("baseline " + data_flags(dir) + " --max-depth 0 --out " + (dir / "z").string(), dir) == 0);
  j = nlohmann::json::parse(slurp(dir / "z" / "baseline.json"));
  CHECK(j["greedy"]["accuracy"]["mean"].get<double>() == doctest::Approx(0.75).epsilon(0.05));
  CHECK(j["majority"]["accuracy"].get<double>() == 0.75);
}

TEST_CASE("analyze and drift commands") {
  const auto dir = scratch("analyze");
  REQUIRE(run("analyze --p 0.5 --p-prime 0.9 --fuzz 100 --out " + (dir / "a").string(), dir) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "a" / "analyze.json"));
  CHECK(j["query_advantage"].get<double>() == doctest::Approx(3.2));
  CHECK(run("analyze --p 1.5", dir) != 0);
  REQUIRE(run("drift --synth --length 2000 --switch-at 1000 --alphas 0,0.2 --out " + (dir / "d").string(), dir) == 0);
  CHECK(fs::exists(dir / "d" / "drift_curves.csv"));
}

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bucketwidth/graph.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;

  json report() const { return json::parse(out); }
  std::vector<json> lines() const {
    std::vector<json> out_lines;
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) out_lines.push_back(json::parse(line));
    }
    return out_lines;
  }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = bucketwidth::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("bucketwidth_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
    write("p4.txt", "4 3\n1 2\n2 3\n3 4\n");
    write("k4.txt", "4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
    write("star5.txt", "5 4\n1 2\n1 3\n1 4\n1 5\n");
    write("c4.txt", "4 4\n1 2\n2 3\n3 4\n4 1\n");
    write("k3.txt", "3 3\n1 2\n2 3\n1 3\n");
    write("k2.txt", "2 1\n1 2\n");
    write("two.txt", "5 3\n1 2\n2 3\n4 5\n");
    write("bad.txt", "2 1\n1 3\n");
    write("k3.dimacs", "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }
  fs::path dir() const { return dir_; }

 private:
  fs::path dir_;
};

}  // namespace

TEST_CASE("bandwidth command") {
  Workspace ws;
  Run a = run({"bandwidth", "--minimize", "--algo", "expspace", ws.path("p4.txt")});
  CHECK(a.code == 0);
  CHECK(a.report()["bandwidth"] == 1);
  CHECK(a.report()["ordering"].size() == 4);
  CHECK_FALSE(a.report().contains("verified"));

  Run b = run({"bandwidth", "--bound", "2", "--algo", "polyspace", ws.path("k4.txt")});
  CHECK(b.code == 1);
  CHECK(b.report()["feasible"] == false);
  CHECK_FALSE(b.report().contains("ordering"));

  Run c = run({"bandwidth", "--minimize", "--algo", "polyspace", "--verify", ws.path("star5.txt")});
  CHECK(c.code == 0);
  CHECK(c.report()["bandwidth"] == 2);
  CHECK(c.report()["verified"] == true);
  CHECK_FALSE(c.err.empty());
}

TEST_CASE("bandwidth splits disconnected graphs") {
  Workspace ws;
  Run a = run({"bandwidth", "--minimize", "--verify", ws.path("two.txt")});
  CHECK(a.code == 0);
  CHECK(a.report()["bandwidth"] == 1);
  CHECK(a.report()["verified"] == true);
  Run b = run({"bandwidth", "--bound", "1", "--algo", "polyspace", ws.path("two.txt")});
  CHECK(b.code == 0);
}

TEST_CASE("distortion command") {
  Workspace ws;
  Run a = run({"distortion", "--minimize", ws.path("c4.txt")});
  CHECK(a.code == 0);
  CHECK(a.report()["distortion"] == 3);
  CHECK(a.report()["embedding"].size() == 4);

  Run b = run({"distortion", "--bound", "1", ws.path("k3.txt")});
  CHECK(b.code == 1);
  CHECK(b.report()["feasible"] == false);

  Run c = run({"distortion", "--minimize", "--r-threshold", "0", ws.path("p4.txt")});
  CHECK(c.code == 0);
  CHECK(c.report()["distortion"] == 1);

  Run d = run({"distortion", "--bound", "5", ws.path("two.txt")});
  CHECK(d.code == 1);
  Run e = run({"distortion", "--minimize", "--algo", "polyspace", "--verify", "--format", "dimacs",
               ws.path("k3.dimacs")});
  CHECK(e.code == 0);
  CHECK(e.report()["distortion"] == 2);
  CHECK(e.report()["verified"] == true);
}

TEST_CASE("usage errors") {
  Workspace ws;
  CHECK(run({}).code == 2);
  CHECK(run({"bandwidth", ws.path("p4.txt")}).code == 2);
  CHECK(run({"bandwidth", "--bound", "1", "--minimize", ws.path("p4.txt")}).code == 2);
  CHECK(run({"bandwidth", "--minimize", "--algo", "magic", ws.path("p4.txt")}).code == 2);
  CHECK(run({"bandwidth", "--minimize", ws.path("missing.txt")}).code == 2);
  Run bad = run({"bandwidth", "--minimize", ws.path("bad.txt")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("out of range") != std::string::npos);
  CHECK(run({"bandwidth", "--help"}).code == 0);
}

TEST_CASE("count and enumerate commands") {
  Workspace ws;
  CHECK(run({"count", "prototypes", "--path", "2", "--both-ends", "--in-A"}).report()["count"] == 22);
  CHECK(run({"count", "prototypes", "--path", "3", "--both-ends", "--in-A"}).report()["count"] == 92);
  CHECK(run({"count", "prototypes", "--path", "2"}).report()["count"] == 13);
  CHECK(run({"count", "triples", "--graph", ws.path("k2.txt"), "--N", "1"}).report()["count"] == 4);
  Run pbf = run({"count", "pbf", "--graph", ws.path("k2.txt"), "--N", "1", "--verify"});
  CHECK(pbf.report()["count"] == 4);
  CHECK(pbf.report()["verified"] == true);

  auto ext = run({"enumerate", "extensions", "--graph", ws.path("k2.txt"), "--assign", "1=0", "--lo", "-2", "--hi",
                  "2"}).lines();
  CHECK(ext.size() == 2);
  auto pbfs = run({"enumerate", "pbf", "--graph", ws.path("k2.txt"), "--N", "1", "--distinct"}).lines();
  CHECK(pbfs.size() == 4);
  auto protos = run({"enumerate", "prototypes", "--path", "1", "--in-A"}).lines();
  CHECK(protos.size() == 4);
}

TEST_CASE("bench command") {
  Workspace ws;
  Run empty_dir = run({"bench", "--corpus", ws.dir().string() + "/none"});
  CHECK(empty_dir.code == 2);
  fs::create_directories(ws.dir() / "empty");
  Run empty = run({"bench", "--corpus", (ws.dir() / "empty").string()});
  CHECK(empty.code == 0);
  CHECK(empty.report()["rows"].empty());

  Run paths = run({"bench", "--paths", "4..10", "--algo", "both"});
  CHECK(paths.code == 0);
  json rows = paths.report()["rows"];
  REQUIRE(rows.size() == 14);
  std::uint64_t last = 0;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    CHECK(rows[i]["value"] == rows[i + 1]["value"]);
    CHECK(rows[i]["peak_table"].get<std::uint64_t>() >= last);
    last = rows[i]["peak_table"].get<std::uint64_t>();
  }
  CHECK(paths.report()["summary"]["optima_agree"] == true);

  fs::create_directories(ws.dir() / "corpus");
  ws.write("corpus/c4.txt", "4 4\n1 2\n2 3\n3 4\n4 1\n");
  ws.write("corpus/k3.txt", "3 3\n1 2\n2 3\n1 3\n");
  Run dist = run({"bench", "--corpus", (ws.dir() / "corpus").string(), "--problem", "distortion", "--jobs", "2"});
  CHECK(dist.code == 0);
  json drows = dist.report()["rows"];
  REQUIRE(drows.size() == 4);
  CHECK(drows[0]["instance"] == "c4.txt");
  CHECK(drows[0]["value"] == 3);
  CHECK(drows[2]["value"] == 2);
}

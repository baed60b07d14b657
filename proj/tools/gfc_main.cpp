/*
 * gfc command-line front-end.
 *
 * Subcommands: generate, solve, verify, spotcheck, simulate, tw.
 * Exit codes: 0 success, 2 invalid arguments, 3 verification failed,
 * 4 numerical/runtime failure.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/engine.hpp"
#include "gfc/experiment.hpp"
#include "gfc/rmt.hpp"
#include "gfc/tw1.hpp"
#include "gfc/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string defaultOutDir() {
  const char *env = std::getenv("GFC_OUT_DIR");
  return env && *env ? env : "out";
}

// Writes <name>.manifest.json next to the artifacts: the invocation
// config plus the sha256 of every produced file.
void writeManifest(const std::string &outDir, const std::string &name,
                   const json &config, const std::vector<std::string> &files) {
  json m;
  m["config"] = config;
  json hashes = json::object();
  for (const auto &f : files) hashes[fs::path(f).filename().string()] = gfc::sha256File(f);
  m["sha256"] = hashes;
  gfc::atomicWrite(outDir + "/" + name + ".manifest.json", m.dump(2) + "\n");
}

gfc::CaseCtx parseCase(const std::string &c) {
  if (c == "m") return gfc::CaseCtx::M;
  if (c == "F") return gfc::CaseCtx::F;
  throw CLI::ValidationError("--case must be m or F");
}

int cmdGenerate(const std::string &caseName, int nMax, const std::string &outDir) {
  gfc::CaseCtx ctx = parseCase(caseName);
  gfc::GenerationResult gen = gfc::generateAll(ctx, nMax);
  gfc::AssembledSystem sys = gfc::assemble(gen, ctx, /*allowMissingTargets=*/true);
  fs::create_directories(outDir);
  gfc::SystemFile sf{caseName, sys.matrix, sys.rhs};
  std::string path = outDir + "/system_" + caseName + ".txt";
  gfc::atomicWrite(path, gfc::writeSystem(sf));
  std::cout << "case " << caseName << ": " << sys.matrix.rows() << "x"
            << sys.matrix.cols() << ", nnz " << sys.matrix.nnz() << ", start terms "
            << gen.startCount << ", duplicates removed " << gen.duplicatesRemoved
            << "\n";
  for (const auto &m : sys.missingTargets)
    std::cout << "note: target unreachable in this basis: " << m << "\n";
  writeManifest(outDir, "generate_" + caseName,
                json{{"subcommand", "generate"}, {"case", caseName}, {"nmax", nMax}},
                {path});
  return 0;
}

int cmdSolve(const std::string &systemPath, const std::string &strategyName,
             const std::string &outDir) {
  gfc::PivotStrategy strategy = strategyName == "first"
                                    ? gfc::PivotStrategy::FirstNonzero
                                : strategyName == "minfill"
                                    ? gfc::PivotStrategy::MinFill
                                    : gfc::PivotStrategy::SmallestPivot;
  gfc::SystemFile sf = gfc::parseSystem(gfc::readFile(systemPath));
  gfc::SolveReport rep = gfc::solve(sf.matrix, sf.rhs, strategy);
  std::cout << "rank " << rep.rank << ", augmented rank " << rep.augmentedRank
            << ", feasible " << (rep.feasible ? "yes" : "no") << ", nonzeros "
            << rep.nonzeros << (rep.integersOnly ? " (all integer)" : "") << "\n"
            << rep.pivotLog << "\n";
  if (!rep.feasible) {
    std::cout << "infeasibility certificate: rank(A|b) = rank(A) + 1\n";
    return 3;
  }
  fs::create_directories(outDir);
  std::string path = outDir + "/solution_" + sf.caseName + ".txt";
  gfc::atomicWrite(path,
                   gfc::writeSolution(sf.caseName, sf.matrix.cols(), rep.solution));
  writeManifest(outDir, "solve_" + sf.caseName,
                json{{"subcommand", "solve"},
                     {"system", systemPath},
                     {"strategy", strategyName},
                     {"system_sha256", gfc::sha256File(systemPath)}},
                {path});
  return rep.residualExactZero ? 0 : 3;
}

int cmdVerify(const std::string &caseName, int nMax, const std::string &crossDir,
              const std::string &outDir) {
  if (!crossDir.empty()) {
    // Cross-validate a published system/solution pair by exact
    // multiplication, plus the fixed positional checks for the m case.
    std::string sysPath = crossDir + "/system_" + caseName + ".txt";
    std::string solPath = crossDir + "/solution_" + caseName + ".txt";
    gfc::SystemFile sf = gfc::parseSystem(gfc::readFile(sysPath));
    auto [solCase, x] = gfc::parseSolution(gfc::readFile(solPath));
    if (solCase != sf.caseName) {
      std::cout << "case mismatch between system and solution files\n";
      return 3;
    }
    bool ok = gfc::verify(sf.matrix, x, sf.rhs);
    std::cout << "cross verification: " << (ok ? "exact" : "FAILED") << "\n";
    if (!ok) return 3;
    if (caseName == "m") {
      bool integers = true;
      for (const auto &[c, v] : x)
        if (v.get_den() != 1) integers = false;
      auto at = [&](int c) { auto it = x.find(c); return it == x.end() ? gfc::Rat(0) : it->second; };
      bool pos = at(3) == gfc::Rat(-1824) && at(54) == gfc::Rat(-12) &&
                 x.size() == 62 && integers;
      std::cout << "positional checks (x3 = -1824, x54 = -12, 62 nonzeros, "
                   "integers): "
                << (pos ? "pass" : "FAILED") << "\n";
      if (!pos) return 3;
    }
    return 0;
  }
  gfc::CancellationReport rep =
      gfc::verifyCancellation(parseCase(caseName), nMax, outDir);
  std::cout << rep.toText() << "\n";
  gfc::atomicWrite(outDir + "/report_" + caseName + ".json", rep.toJson() + "\n");
  writeManifest(outDir, "verify_" + caseName,
                json{{"subcommand", "verify"}, {"case", caseName}, {"nmax", nMax}},
                {outDir + "/system_" + caseName + ".txt",
                 outDir + "/solution_" + caseName + ".txt",
                 outDir + "/report_" + caseName + ".json"});
  return rep.solved && rep.verified ? 0 : 3;
}

int cmdSpotcheck() {
  auto fmt = [](const std::vector<gfc::Rat> &v) {
    std::ostringstream s;
    s << "{";
    for (std::size_t i = 0; i < v.size(); ++i)
      s << (i ? ", " : "") << gfc::ratToString(v[i]);
    s << "}";
    return s.str();
  };
  std::vector<gfc::Rat> r1 = gfc::spotcheckRule1Multiset();
  std::vector<gfc::Rat> r3 = gfc::spotcheckRule3Multiset();
  std::vector<gfc::Rat> want1 = {gfc::Rat(-5, 2), gfc::Rat(-1), gfc::Rat(-1),
                                 gfc::Rat(-1, 2), gfc::Rat(-1, 2), gfc::Rat(-1, 2)};
  std::vector<gfc::Rat> want3 = {gfc::Rat(-3), gfc::Rat(-2), gfc::Rat(-2),
                                 gfc::Rat(-1), gfc::Rat(-1)};
  bool ok1 = r1 == want1, ok3 = r3 == want3;
  std::cout << "rule 1 identity coefficients: " << fmt(r1)
            << (ok1 ? " (expected)" : " MISMATCH, expected " + fmt(want1)) << "\n";
  std::cout << "rule 3 identity coefficients: " << fmt(r3)
            << (ok3 ? " (expected)" : " MISMATCH, expected " + fmt(want3)) << "\n";
  return ok1 && ok3 ? 0 : 3;
}

int cmdSimulate(const std::string &configPath, const std::string &outDir) {
  gfc::ExperimentConfig cfg =
      gfc::parseExperimentConfig(gfc::readFile(configPath));
  std::vector<std::vector<double>> samples;
  auto rows = gfc::convergenceExperiment(cfg, &samples);
  fs::create_directories(outDir);
  std::string csvPath = outDir + "/experiment.csv";
  gfc::atomicWrite(csvPath, gfc::experimentCsv(rows));
  std::vector<std::string> files = {csvPath};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::ostringstream dump;
    dump.precision(17);
    for (double v : samples[i]) dump << v << "\n";
    std::string path = outDir + "/samples_N" + std::to_string(rows[i].N) +
                       "_seed" + std::to_string(rows[i].seed) + ".txt";
    gfc::atomicWrite(path, dump.str());
    files.push_back(path);
  }
  std::cout << gfc::experimentCsv(rows);
  writeManifest(outDir, "simulate",
                json{{"subcommand", "simulate"},
                     {"config", json::parse(gfc::readFile(configPath))}},
                files);
  return 0;
}

int cmdTw(const std::string &gridPath, const std::string &outDir) {
  std::istringstream in(gfc::readFile(gridPath));
  std::ostringstream csv;
  csv.precision(12);
  csv << "r,F1\n";
  double r;
  while (in >> r) csv << r << ',' << gfc::tw1CDF(r) << '\n';
  fs::create_directories(outDir);
  std::string path = outDir + "/tw1.csv";
  gfc::atomicWrite(path, csv.str());
  std::cout << csv.str();
  writeManifest(outDir, "tw", json{{"subcommand", "tw"}, {"grid", gridPath}},
                {path});
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Green-function comparison toolkit"};
  app.require_subcommand(1);
  std::string outDir = defaultOutDir();
  app.add_option("--out", outDir, "output directory (default $GFC_OUT_DIR or ./out)");

  std::string genCase = "m";
  int genNMax = 4;
  auto *gen = app.add_subcommand("generate", "generate and write a linear system");
  gen->add_option("--case", genCase, "m or F")->required();
  gen->add_option("--nmax", genNMax, "start-term index budget (default 4)");

  std::string sysPath, strategy = "smallest";
  auto *sol = app.add_subcommand("solve", "solve a system file exactly");
  sol->add_option("--system", sysPath, "system file")->required();
  sol->add_option("--strategy", strategy, "smallest|first|minfill")
      ->check(CLI::IsMember({"smallest", "first"}));

  std::string verCase = "m", crossDir;
  int verNMax = 4;
  auto *ver = app.add_subcommand("verify", "end-to-end cancellation verification");
  ver->add_option("--case", verCase, "m or F")->required();
  ver->add_option("--nmax", verNMax, "start-term index budget (default 4)");
  ver->add_option("--cross", crossDir, "directory with published system/solution");

  std::string spotWhat = "appendixB";
  auto *spot = app.add_subcommand("spotcheck", "re-derive worked identities");
  spot->add_option("what", spotWhat, "appendixB")->required();

  std::string simConfig;
  auto *sim = app.add_subcommand("simulate", "run the convergence experiment");
  sim->add_option("--config", simConfig, "experiment config JSON")->required();

  std::string gridPath;
  auto *tw = app.add_subcommand("tw", "evaluate the Tracy-Widom F1 CDF");
  tw->add_option("--grid", gridPath, "file of r values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmdGenerate(genCase, genNMax, outDir);
    if (sol->parsed()) return cmdSolve(sysPath, strategy, outDir);
    if (ver->parsed()) return cmdVerify(verCase, verNMax, crossDir, outDir);
    if (spot->parsed()) {
      if (spotWhat != "appendixB") {
        std::cerr << "unknown spotcheck: " << spotWhat << "\n";
        return 2;
      }
      return cmdSpotcheck();
    }
    if (sim->parsed()) return cmdSimulate(simConfig, outDir);
    if (tw->parsed()) return cmdTw(gridPath, outDir);
  } catch (const CLI::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

#include "pbj/analyze.hpp"
#include "pbj/io.hpp"
#include "pbj/sim.hpp"
#include "pbj/types.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

namespace {

// Exit codes: 0 ok, 2 validation, 3 I/O, 4 numerical failure.
int run(int argc, char** argv) {
  CLI::App app{"Simultaneous linear-model hypothesis testing with "
               "family-wise error control"};
  app.require_subcommand(1);

  // ---- analyze ----
  auto* analyzeCmd = app.add_subcommand(
      "analyze", "Test all locations of an outcome matrix against a design");
  std::string outcomePath, designPath, outPath = "report.csv";
  std::vector<std::string> testedColumns;
  pbj::AnalysisConfig cfg;
  bool haveSeed = false;
  std::uint64_t seed = 0;
  std::string pbjDump, permDump;
  analyzeCmd->add_option("--outcome", outcomePath, "Outcome matrix (n x V)")
      ->required();
  analyzeCmd->add_option("--design", designPath, "Design matrix (n x m)")
      ->required();
  analyzeCmd
      ->add_option("--test", testedColumns,
                   "Design columns under test (labels or 0-based indices)")
      ->required();
  analyzeCmd->add_option(
      "--method", cfg.methods,
      "Any of: bonferroni holm pbj-ss pbj-sd perm-ss perm-sd");
  analyzeCmd->add_option("--B", cfg.B, "Null replicates");
  analyzeCmd->add_option("--seed", seed, "Master seed (default: entropy)");
  analyzeCmd->add_option("--alpha", cfg.alpha, "Nominal FWER level");
  analyzeCmd->add_flag("--yeo-johnson", cfg.applyYeoJohnson,
                       "Fit and apply a Yeo-Johnson transform per location");
  analyzeCmd->add_option("--out", outPath, "Report CSV path");
  analyzeCmd->add_option("--threads", cfg.threads, "Worker threads");
  analyzeCmd->add_option("--dump-pbj", pbjDump, "Binary PBJ ensemble dump");
  analyzeCmd->add_option("--dump-perm", permDump, "Binary permutation ensemble dump");
  analyzeCmd->add_flag("--exhaustive-perm", cfg.exhaustivePerm,
                       "Enumerate all n! permutations (requires B = n!)");

  // ---- simulate ----
  auto* simCmd = app.add_subcommand(
      "simulate", "Monte-Carlo FWER/power study (synthetic or injection)");
  pbj::SyntheticConfig syn;
  std::string covariance = "independent", preset, simOut, injectPath;
  bool csv = false;
  pbj::InjectionConfig inj;
  simCmd->add_option("--preset", preset,
                     "table-n40 or table-n100 (synthetic sweeps)");
  simCmd->add_option("--n", syn.n, "Sample size");
  simCmd->add_option("--V", syn.V, "Number of locations");
  simCmd->add_option("--covariance", covariance,
                     "independent, posAR1, or negAR1");
  simCmd->add_option("--rho", syn.rho, "AR(1) correlation magnitude");
  simCmd->add_option("--effect", syn.effect, "Mean shift at false nulls");
  simCmd->add_option("--nsims", syn.nSims, "Simulation count");
  simCmd->add_option("--B", syn.B, "Null replicates per simulation");
  simCmd->add_option("--alpha", syn.alpha, "Nominal FWER level");
  simCmd->add_option("--seed", seed, "Master seed (default: entropy)");
  simCmd->add_option("--threads", syn.threads, "Worker threads");
  simCmd->add_option(
      "--methods", syn.methods,
      "Synthetic: holm-T holm-Z pbj-T pbj-Z pbj-trueSigma perm-T; "
      "injection: bonferroni holm pbj perm");
  simCmd->add_option("--out", simOut, "Write table here instead of stdout");
  simCmd->add_flag("--csv", csv, "CSV table instead of aligned text");
  simCmd->add_option("--inject", injectPath,
                     "Base data matrix; switches to the signal-injection study");
  simCmd->add_option("--subsample", inj.subsampleSize, "Injection subsample size");
  simCmd->add_option("--signal-regions", inj.nSignalRegions,
                     "Number of injected signal locations");
  simCmd->add_option("--signal-beta", inj.signalBeta, "Injected effect size");
  simCmd->add_option("--test-df", inj.testDf, "1 or 3 degrees of freedom");
  bool noYj = false;
  simCmd->add_flag("--no-yeo-johnson", noYj,
                   "Skip the per-location transform in the injection study");

  analyzeCmd->callback([&] { haveSeed = analyzeCmd->count("--seed") > 0; });
  simCmd->callback([&] { haveSeed = simCmd->count("--seed") > 0; });

  CLI11_PARSE(app, argc, argv);

  if (!haveSeed) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    std::cerr << "seed: " << seed << "\n";
  }

  if (analyzeCmd->parsed()) {
    cfg.seed = seed;
    cfg.testedColumns = testedColumns;
    if (cfg.methods.empty()) cfg.methods = {"bonferroni", "holm", "pbj-sd"};
    if (!pbjDump.empty()) cfg.pbjEnsemblePath = pbjDump;
    if (!permDump.empty()) cfg.permEnsemblePath = permDump;
    if (cfg.B < 1) throw pbj::ValidationError("B must be >= 1");
    const auto anySd = [&](const char* prefix) {
      for (const auto& m : cfg.methods)
        if (m == std::string(prefix) + "-sd") return true;
      return false;
    };
    pbj::AnalysisResult result =
        pbj::analyze_files(outcomePath, designPath, outPath, cfg);
    if ((anySd("pbj") || anySd("perm")) &&
        result.stats.F.size() > static_cast<pbj::Index>(cfg.B))
      std::cerr << "warning: step-down with V > B; cutoff estimates will be "
                   "coarse\n";
    std::cout << "wrote " << outPath << "\n";
    return 0;
  }

  // simulate
  if (simCmd->count("--nsims") > 0 && syn.nSims < 1)
    throw pbj::ValidationError("--nsims must be >= 1");
  std::string label;
  std::string table;
  if (!injectPath.empty()) {
    inj.baseData = pbj::load_matrix(injectPath).values;
    inj.nSims = syn.nSims;
    inj.B = syn.B;
    inj.alpha = syn.alpha;
    inj.seed = seed;
    inj.threads = syn.threads;
    inj.methods = syn.methods;
    inj.applyYeoJohnson = !noYj;
    label = "injection n=" + std::to_string(inj.subsampleSize) +
            " V=" + std::to_string(inj.baseData.cols()) +
            " df=" + std::to_string(inj.testDf);
    table = pbj::format_study(pbj::run_injection(inj), label, csv);
  } else {
    if (covariance == "independent")
      syn.covariance = pbj::CovStructure::Independent;
    else if (covariance == "posAR1")
      syn.covariance = pbj::CovStructure::PosAr1;
    else if (covariance == "negAR1")
      syn.covariance = pbj::CovStructure::NegAr1;
    else
      throw pbj::ValidationError("unknown covariance: " + covariance);
    if (!preset.empty()) {
      if (preset == "table-n40")
        syn.n = 40;
      else if (preset == "table-n100")
        syn.n = 100;
      else
        throw pbj::ValidationError("unknown preset: " + preset);
      if (syn.methods.empty())
        syn.methods = {"holm-T", "holm-Z", "pbj-trueSigma",
                       "pbj-T",  "pbj-Z",  "perm-T"};
    }
    syn.seed = seed;
    label = "synthetic n=" + std::to_string(syn.n) +
            " V=" + std::to_string(syn.V) + " cov=" + covariance +
            " effect=" + std::to_string(syn.effect);
    table = pbj::format_study(pbj::run_synthetic(syn), label, csv);
  }
  if (simOut.empty()) {
    std::cout << "# " << label << "\n" << table;
  } else {
    std::ofstream out(simOut);
    if (!out) throw pbj::IoError("cannot open " + simOut + " for writing");
    out << "# " << label << "\n" << table;
    std::cout << "wrote " << simOut << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pbj::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pbj::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const pbj::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dreg/bandit.hpp"
#include "dreg/config.hpp"
#include "dreg/csvio.hpp"
#include "dreg/learners.hpp"
#include "dreg/runner.hpp"

namespace {

void print_pool(const char* name, const dreg::StepSizePool& pool) {
    std::printf("%-18s cap=%s  n=%zu :", name, dreg::format_double(pool.cap).c_str(),
                pool.size());
    for (double eta : pool.etas) std::printf(" %s", dreg::format_double(eta).c_str());
    std::printf("\n");
}

int cmd_run(const std::string& config_path, bool check_bounds,
            const std::vector<std::uint64_t>& seed_override, const std::string& out_dir) {
    dreg::ExperimentConfig cfg = dreg::load_config(config_path);
    if (!seed_override.empty()) cfg.seeds = seed_override;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    dreg::RunOutput out = dreg::run_experiment(cfg, check_bounds);
    std::printf("config hash %016llx\n", static_cast<unsigned long long>(out.config_hash));
    for (const std::string& file : out.files) std::printf("wrote %s\n", file.c_str());
    return 0;
}

int cmd_compare(const std::vector<std::string>& files, const std::string& out_dir) {
    std::filesystem::path dir = out_dir.empty()
                                    ? std::filesystem::path(files.front()).parent_path()
                                    : std::filesystem::path(out_dir);
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::string out_csv = (dir / "compare.csv").string();
    std::string table = dreg::compare_records(files, out_csv);
    std::fputs(table.c_str(), stdout);
    std::printf("wrote %s\n", out_csv.c_str());
    return 0;
}

int cmd_pools(double G, double D, double L, double T, std::size_t d) {
    print_pool("sword", dreg::build_pool_sword(G, D, L, T));
    print_pool("swordpp", dreg::build_pool_swordpp(G, D, L, T));
    print_pool("ader", dreg::build_pool_ader(G, D, L, T));
    print_pool("bandit_variation",
               dreg::build_pool_bandit(dreg::BanditMode::variation, G, D, L, T, d));
    print_pool("bandit_zero", dreg::build_pool_bandit(dreg::BanditMode::zero, G, D, L, T, d));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"benchmark harness for problem-adaptive dynamic-regret online learning"};
    app.require_subcommand(1);

    std::string config_path;
    bool check_bounds = false;
    std::vector<std::uint64_t> seed_override;
    std::string out_dir;
    CLI::App* run = app.add_subcommand("run", "execute every (algorithm, seed) pair of a config");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_flag("--check-bounds", check_bounds,
                  "also emit a certificates csv (quadratic1 environment only)");
    run->add_option("--seed-override", seed_override, "replace the config's seed list")
        ->delimiter(',');
    run->add_option("--out-dir", out_dir, "replace the config's output directory");

    std::vector<std::string> compare_files;
    std::string compare_out_dir;
    CLI::App* compare = app.add_subcommand("compare", "tabulate summary csvs");
    compare->add_option("files", compare_files, "summary csv files")->required();
    compare->add_option("--out-dir", compare_out_dir, "where compare.csv goes");

    double G = 0.0, D = 0.0, L = 0.0, T = 0.0;
    std::size_t dim = 2;
    CLI::App* pools = app.add_subcommand("pools", "print the step-size grids");
    pools->add_option("G", G, "gradient bound")->required();
    pools->add_option("D", D, "domain diameter")->required();
    pools->add_option("L", L, "smoothness")->required();
    pools->add_option("T", T, "horizon")->required();
    pools->add_option("--dim", dim, "dimension for the bandit grids");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, check_bounds, seed_override, out_dir);
        if (compare->parsed()) return cmd_compare(compare_files, compare_out_dir);
        if (pools->parsed()) return cmd_pools(G, D, L, T, dim);
    } catch (const dreg::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

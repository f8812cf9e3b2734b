// Command-line driver: reproducible training runs, checkpoint evaluation,
// reference-table emission, and config printing.
//
// Exit codes: 0 success, 2 usage error, 3 training divergence, 4 I/O error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "auctionrl/checkpoint.hpp"
#include "auctionrl/eval.hpp"
#include "auctionrl/experiments.hpp"
#include "auctionrl/sac.hpp"

namespace {

using namespace auctionrl;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    unsigned long seed = 0;
    std::string out = ".";
    double scale = 1.0;
    int workers = 0;  // 0: keep the spec's parallel_envs
    std::string config;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "RNG seed for training and evaluation");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--scale", o.scale, "budget scale factor in (0, 1]");
    cmd->add_option("--workers", o.workers, "cap on parallel environment copies");
    cmd->add_option("--config", o.config, "flat key=value config file");
}

ExperimentSpec build_spec(const std::string& id_name, const CommonOpts& o) {
    ExperimentSpec spec = make_experiment(experiment_from_string(id_name));
    if (!o.config.empty()) apply_config_file(spec, o.config);
    if (o.scale != 1.0) apply_scale(spec, o.scale);
    spec.train.seed = o.seed;
    spec.eval.seed = o.seed;
    if (o.workers > 0)
        spec.train.parallel_envs = std::min(spec.train.parallel_envs, o.workers);
    return spec;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open for writing: " + path);
    return os;
}

void write_report_files(const std::string& dir, const EvalReport& rep) {
    auto kv = open_out(dir + "/eval_report.txt");
    kv.precision(12);
    rep.write_keyvalue(kv);
    auto row = open_out(dir + "/eval_summary.tsv");
    row.precision(12);
    row << "experiment\toptimal_reward\tachieved_reward\tachieved_se\t"
           "utility_difference";
    for (const auto& [k, v] : rep.l2_per_round) row << "\tl2_" << k;
    row << "\tl2_value_function\tn_profiles\n";
    rep.write_row(row);
}

void write_plot_data(const std::string& dir, const ExperimentSpec& spec,
                     const GaussianPolicy& policy) {
    LearnerFn mean_learner = [&](const Observation& obs) {
        return policy.mean_action(obs.features(spec.settings));
    };
    for (int round = 0; round < spec.settings.n_rounds; ++round) {
        auto os = open_out(dir + "/bid_table_round" + std::to_string(round + 1) +
                           ".tsv");
        os.precision(12);
        export_bid_table(os, mean_learner, spec.id, spec.settings, round, spec.eval);
    }
    if (spec.settings.n_rounds >= 2) {
        auto os = open_out(dir + "/round2_surface.tsv");
        os.precision(12);
        export_round2_surface(os, mean_learner, spec.id, spec.settings, spec.eval);
    }
}

void save_trainer_checkpoint(const std::string& path, ExperimentId id,
                             const SacTrainer& trainer) {
    checkpoint::Snapshot snap;
    snap.id = id;
    snap.policy = trainer.policy();
    snap.q1 = trainer.q1();
    snap.q2 = trainer.q2();
    snap.q1_target = trainer.q1_target();
    snap.q2_target = trainer.q2_target();
    snap.log_alpha = trainer.log_alpha();
    checkpoint::save_file(path, snap);
}

int cmd_run(const std::string& id_name, const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSpec spec = build_spec(id_name, o);
    spec.settings.validate();
    spec.train.validate();
    spec.eval.validate();

    std::filesystem::create_directories(o.out);
    {
        auto os = open_out(o.out + "/manifest.txt");
        write_manifest(os, spec, o.seed, o.scale, o.out);
    }

    auto log_os = open_out(o.out + "/training_log.tsv");
    log_os.precision(12);
    log_os << "epoch\tmean_reward\tcritic_loss\tactor_loss\talpha\tentropy\n";
    auto on_epoch = [&](const TrainLogRow& row) {
        log_os << row.epoch << '\t' << row.mean_reward << '\t' << row.critic_loss
               << '\t' << row.actor_loss << '\t' << row.alpha << '\t' << row.entropy
               << '\n';
        log_os.flush();
    };

    SacTrainer trainer(spec.settings, spec.opponents, spec.train);
    try {
        trainer.train(on_epoch);
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        try {
            save_trainer_checkpoint(o.out + "/checkpoint.txt", spec.id, trainer);
        } catch (...) {
            // partial artifacts are best effort once training has diverged
        }
        return kExitDivergence;
    }
    save_trainer_checkpoint(o.out + "/checkpoint.txt", spec.id, trainer);

    const double penalty = spec.train.squash == Squash::Identity
                               ? spec.train.neg_bid_penalty
                               : 0.0;
    const EvalReport rep =
        evaluate_policy(trainer.policy(), trainer.q1(), trainer.q2(), spec.id,
                        spec.settings, spec.eval, penalty);
    write_report_files(o.out, rep);
    write_plot_data(o.out, spec, trainer.policy());

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        auto os = open_out(o.out + "/duration.txt");
        os << "wall_clock_seconds=" << secs << '\n';
    }
    rep.write_keyvalue(std::cout);
    return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const CommonOpts& o) {
    const checkpoint::Snapshot snap = checkpoint::load_file(ckpt_path);
    ExperimentSpec spec = build_spec(to_string(snap.id), o);
    if (snap.policy.trunk.in_dim() != spec.settings.obs_dim() ||
        snap.policy.action_dim != spec.settings.action_dim())
        throw CLI::ValidationError(
            "checkpoint architecture does not match the experiment settings");
    const double penalty = snap.policy.squash == Squash::Identity
                               ? spec.train.neg_bid_penalty
                               : 0.0;
    const EvalReport rep = evaluate_policy(snap.policy, snap.q1, snap.q2, snap.id,
                                           spec.settings, spec.eval, penalty);
    if (o.out != ".") {
        std::filesystem::create_directories(o.out);
        write_report_files(o.out, rep);
        write_plot_data(o.out, spec, snap.policy);
    }
    std::cout.precision(12);
    rep.write_keyvalue(std::cout);
    return kExitOk;
}

int cmd_reference_tables(const CommonOpts& o) {
    std::filesystem::create_directories(o.out);
    emit_reference_tables(o.out);
    std::cout << "wrote reference tables to " << o.out << "\n";
    return kExitOk;
}

int cmd_print_config(const std::string& id_name, const CommonOpts& o) {
    std::vector<std::string> names;
    if (id_name.empty()) {
        for (ExperimentId id :
             {ExperimentId::SplitTruthful2, ExperimentId::SplitEquilibrium3,
              ExperimentId::Seq1FP2, ExperimentId::Seq1SP2,
              ExperimentId::Seq2FPTruthful3, ExperimentId::Seq2FPEquilibrium3})
            names.push_back(to_string(id));
    } else {
        names.push_back(id_name);
    }
    for (const auto& name : names) {
        const ExperimentSpec spec = build_spec(name, o);
        std::cout << "[" << name << "]\n";
        for (const auto& [k, v] : spec_to_keyvalue(spec)) std::cout << k << '=' << v << '\n';
        for (const auto& k : extension_keys()) std::cout << "extension=" << k << '\n';
        std::cout << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"auctionrl: soft actor-critic bidders for dynamic auctions"};
    app.require_subcommand(1);

    CommonOpts run_o, eval_o, ref_o, print_o;
    std::string run_id, ckpt_path, print_id;

    auto* run = app.add_subcommand("run", "train one named experiment");
    run->add_option("experiment-id", run_id, "experiment name")->required();
    add_common(run, run_o);

    auto* ev = app.add_subcommand("eval", "evaluate a saved checkpoint");
    ev->add_option("checkpoint", ckpt_path, "checkpoint file")->required();
    add_common(ev, eval_o);

    auto* ref = app.add_subcommand("reference-tables",
                                   "emit oracle tables and diagnostics");
    add_common(ref, ref_o);

    auto* pc = app.add_subcommand("print-config", "print resolved configuration");
    pc->add_option("experiment-id", print_id, "limit to one experiment");
    add_common(pc, print_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_id, run_o);
        if (ev->parsed()) return cmd_eval(ckpt_path, eval_o);
        if (ref->parsed()) return cmd_reference_tables(ref_o);
        return cmd_print_config(print_id, print_o);
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

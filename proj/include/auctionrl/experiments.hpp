#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "auctionrl/auction.hpp"
#include "auctionrl/eval.hpp"
#include "auctionrl/experiment_id.hpp"
#include "auctionrl/sac.hpp"
#include "auctionrl/strategies.hpp"

namespace auctionrl {

inline constexpr const char* kCodeVersion = "auctionrl 1.0.0";

struct ExperimentSpec {
    ExperimentId id = ExperimentId::Seq1SP2;
    AuctionSettings settings;
    StrategyKind opponents = StrategyKind::Equilibrium;
    TrainConfig train;
    EvalConfig eval;
};

// Named configurations with the published hyperparameters as defaults.
// Fields the write-up leaves open (batch size, buffer capacity, polyak rate,
// relabel ratio, non-seq update counts) carry documented extension defaults.
inline ExperimentSpec make_experiment(ExperimentId id) {
    ExperimentSpec spec;
    spec.id = id;
    spec.opponents = opponent_kind(id);
    AuctionSettings& s = spec.settings;
    TrainConfig& t = spec.train;

    switch (id) {
        case ExperimentId::SplitTruthful2:
        case ExperimentId::SplitEquilibrium3:
            s.kind = AuctionKind::SplitAward;
            s.n_bidders = id == ExperimentId::SplitTruthful2 ? 2 : 3;
            s.n_rounds = 2;
            s.type_lo = 1.0;
            s.type_hi = 2.0;
            s.scale_c = 0.2;
            t.actor_lr = 1e-3;
            t.critic_lr = 3e-3;
            t.target_entropy = -20.0;
            t.squash = Squash::AffineTanh;
            t.squash_lo = 0.0;
            t.squash_hi = 2.0 * s.type_hi;
            break;
        case ExperimentId::Seq1FP2:
        case ExperimentId::Seq1SP2:
            s.kind = AuctionKind::SequentialSales;
            s.n_bidders = 2;
            s.n_rounds = 1;
            s.price_rule = id == ExperimentId::Seq1FP2 ? PriceRule::FirstPrice
                                                       : PriceRule::SecondPrice;
            s.type_lo = 0.0;
            s.type_hi = 1.0;
            t.actor_lr = 1e-3;
            t.critic_lr = 3e-3;
            t.target_entropy = -10.0;
            t.squash = Squash::AffineTanh;
            t.squash_lo = 0.0;
            t.squash_hi = s.type_hi;
            break;
        case ExperimentId::Seq2FPTruthful3:
            s.kind = AuctionKind::SequentialSales;
            s.n_bidders = 3;
            s.n_rounds = 2;
            s.price_rule = PriceRule::FirstPrice;
            s.type_lo = 0.0;
            s.type_hi = 1.0;
            t.actor_lr = 1e-4;
            t.critic_lr = 3e-4;
            t.target_entropy = -10.0;
            t.squash = Squash::AffineTanh;
            t.squash_lo = 0.0;
            t.squash_hi = s.type_hi;
            break;
        case ExperimentId::Seq2FPEquilibrium3:
            s.kind = AuctionKind::SequentialSales;
            s.n_bidders = 3;
            s.n_rounds = 2;
            s.price_rule = PriceRule::FirstPrice;
            s.type_lo = 0.0;
            s.type_hi = 1.0;
            t.actor_lr = 3e-3;
            t.critic_lr = 3e-3;
            t.target_entropy = -5.0;
            t.policy_hidden = {64};
            t.critic_hidden = {64, 64};
            t.squash = Squash::Identity;
            t.neg_bid_penalty = 1.0;
            break;
    }
    return spec;
}

// Reduce the run to a fraction of the published budget. Tolerances in the
// published tables assume scale 1.
inline void apply_scale(ExperimentSpec& spec, double scale) {
    if (scale <= 0.0 || scale > 1.0)
        throw std::invalid_argument("scale must lie in (0, 1]");
    auto shrink = [&](int v, int floor_v) {
        return std::max(floor_v, static_cast<int>(std::lround(v * scale)));
    };
    spec.train.epochs = shrink(spec.train.epochs, 1);
    spec.train.experience_episodes_per_epoch =
        shrink(spec.train.experience_episodes_per_epoch, 4);
    spec.train.update_steps_per_epoch = shrink(spec.train.update_steps_per_epoch, 1);
    spec.train.parallel_envs = spec.train.experience_episodes_per_epoch;
}

// ---------------------------------------------------------------------------
// Flat key-value config handling
// ---------------------------------------------------------------------------

inline std::map<std::string, std::string> spec_to_keyvalue(const ExperimentSpec& spec) {
    std::map<std::string, std::string> kv;
    auto put = [&](const std::string& k, auto v) { kv[k] = std::to_string(v); };
    kv["experiment"] = to_string(spec.id);
    put("train.epochs", spec.train.epochs);
    put("train.experience_episodes_per_epoch", spec.train.experience_episodes_per_epoch);
    put("train.update_steps_per_epoch", spec.train.update_steps_per_epoch);
    put("train.batch_size", spec.train.batch_size);
    put("train.gamma", spec.train.gamma);
    put("train.actor_lr", spec.train.actor_lr);
    put("train.critic_lr", spec.train.critic_lr);
    put("train.target_entropy", spec.train.target_entropy);
    put("train.tau", spec.train.tau);
    put("train.relabel_fraction", spec.train.relabel_fraction);
    put("train.seed", spec.train.seed);
    put("train.parallel_envs", spec.train.parallel_envs);
    put("train.neg_bid_penalty", spec.train.neg_bid_penalty);
    put("train.buffer_capacity", spec.train.buffer_capacity);
    {
        std::string ph, ch;
        for (int h : spec.train.policy_hidden) ph += (ph.empty() ? "" : ",") + std::to_string(h);
        for (int h : spec.train.critic_hidden) ch += (ch.empty() ? "" : ",") + std::to_string(h);
        kv["train.policy_hidden"] = ph;
        kv["train.critic_hidden"] = ch;
    }
    kv["train.squash"] =
        spec.train.squash == Squash::AffineTanh ? "affine-tanh" : "identity";
    put("train.squash_lo", spec.train.squash_lo);
    put("train.squash_hi", spec.train.squash_hi);
    put("eval.n_profiles", spec.eval.n_profiles);
    put("eval.grid_size", spec.eval.grid_size);
    put("eval.seed", spec.eval.seed);
    kv["eval.deterministic_policy"] = spec.eval.deterministic_policy ? "1" : "0";
    return kv;
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw std::invalid_argument("empty layer list");
    return out;
}

inline void apply_config_entry(ExperimentSpec& spec, const std::string& key,
                               const std::string& value) {
    TrainConfig& t = spec.train;
    EvalConfig& e = spec.eval;
    if (key == "train.epochs") t.epochs = std::stoi(value);
    else if (key == "train.experience_episodes_per_epoch")
        t.experience_episodes_per_epoch = std::stoi(value);
    else if (key == "train.update_steps_per_epoch")
        t.update_steps_per_epoch = std::stoi(value);
    else if (key == "train.batch_size") t.batch_size = std::stoi(value);
    else if (key == "train.gamma") t.gamma = std::stod(value);
    else if (key == "train.actor_lr") t.actor_lr = std::stod(value);
    else if (key == "train.critic_lr") t.critic_lr = std::stod(value);
    else if (key == "train.target_entropy") t.target_entropy = std::stod(value);
    else if (key == "train.tau") t.tau = std::stod(value);
    else if (key == "train.relabel_fraction") t.relabel_fraction = std::stod(value);
    else if (key == "train.seed") t.seed = std::stoul(value);
    else if (key == "train.parallel_envs") t.parallel_envs = std::stoi(value);
    else if (key == "train.neg_bid_penalty") t.neg_bid_penalty = std::stod(value);
    else if (key == "train.buffer_capacity") t.buffer_capacity = std::stoul(value);
    else if (key == "train.policy_hidden") t.policy_hidden = parse_int_list(value);
    else if (key == "train.critic_hidden") t.critic_hidden = parse_int_list(value);
    else if (key == "train.squash_lo") t.squash_lo = std::stod(value);
    else if (key == "train.squash_hi") t.squash_hi = std::stod(value);
    else if (key == "eval.n_profiles") e.n_profiles = std::stoi(value);
    else if (key == "eval.grid_size") e.grid_size = std::stoi(value);
    else if (key == "eval.seed") e.seed = std::stoul(value);
    else if (key == "eval.deterministic_policy")
        e.deterministic_policy = value == "1" || value == "true";
    else throw std::invalid_argument("unknown config key: " + key);
}

inline void apply_config_file(ExperimentSpec& spec, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == '[') continue;
        const auto pos = line.find('=');
        if (pos == std::string::npos)
            throw std::invalid_argument("malformed config line: " + line);
        apply_config_entry(spec, line.substr(0, pos), line.substr(pos + 1));
    }
}

// Hyperparameters the write-up never states; flagged in every manifest.
inline const std::vector<std::string>& extension_keys() {
    static const std::vector<std::string> keys{
        "train.batch_size",      "train.buffer_capacity", "train.tau",
        "train.relabel_fraction", "train.neg_bid_penalty", "train.squash_lo",
        "train.squash_hi"};
    return keys;
}

inline void write_manifest(std::ostream& os, const ExperimentSpec& spec,
                           unsigned long seed, double scale,
                           const std::string& output_dir) {
    os << "code_version=" << kCodeVersion << '\n';
    os << "seed=" << seed << '\n';
    os << "scale=" << scale << '\n';
    os << "output_dir=" << output_dir << '\n';
    for (const auto& [k, v] : spec_to_keyvalue(spec)) os << k << '=' << v << '\n';
    for (const auto& k : extension_keys()) os << "extension=" << k << '\n';
}

// ---------------------------------------------------------------------------
// Reference tables: oracle bid functions, oracle values, quadrature checks
// ---------------------------------------------------------------------------

inline void emit_reference_tables(const std::string& output_dir) {
    const auto path = [&](const std::string& name) { return output_dir + "/" + name; };

    {
        std::ofstream os(path("oracle_values.tsv"));
        os.precision(15);
        os << "experiment\toptimal_reward\n";
        for (ExperimentId id :
             {ExperimentId::SplitTruthful2, ExperimentId::SplitEquilibrium3,
              ExperimentId::Seq1FP2, ExperimentId::Seq1SP2,
              ExperimentId::Seq2FPTruthful3, ExperimentId::Seq2FPEquilibrium3}) {
            const auto spec = make_experiment(id);
            os << to_string(id) << '\t'
               << oracle_expected_utility(id, spec.settings) << '\n';
        }
    }

    {
        const auto spec = make_experiment(ExperimentId::SplitEquilibrium3);
        std::ofstream os(path("split_equilibrium_n3.tsv"));
        os.precision(15);
        os << "theta\tfirst_round_quadrature\tfirst_round_closed\t"
              "second_round_loser_quadrature\tsecond_round_loser_closed\n";
        double max_dev = 0.0;
        const int n = 1000;
        for (int i = 0; i < n; ++i) {
            const double theta = 1.0 + (1.0 - 1e-6) * i / static_cast<double>(n - 1);
            const double q1 = split::first_round_bid(theta, spec.settings);
            const double q2 = split::second_round_loser_bid(theta, spec.settings);
            const auto [c1, c2] = split_equilibrium_closed_form_n3(theta, 0.2);
            max_dev = std::max({max_dev, std::abs(q1 - c1), std::abs(q2 - c2)});
            os << theta << '\t' << q1 << '\t' << c1 << '\t' << q2 << '\t' << c2
               << '\n';
        }
        std::ofstream diag(path("split_equilibrium_n3_diagnostic.txt"));
        diag.precision(15);
        diag << "max_abs_deviation=" << max_dev << '\n';
    }

    {
        std::ofstream os(path("seq_equilibrium_bids.tsv"));
        os << "theta\tseq1_fp\tseq1_sp\tseq2_fp_round1\tseq2_fp_round2\n";
        for (int i = 0; i <= 100; ++i) {
            const double theta = i / 100.0;
            os << theta << '\t'
               << seq_equilibrium_bid(theta, 1, 2, 1, PriceRule::FirstPrice) << '\t'
               << seq_equilibrium_bid(theta, 1, 2, 1, PriceRule::SecondPrice) << '\t'
               << seq_equilibrium_bid(theta, 1, 3, 2, PriceRule::FirstPrice) << '\t'
               << seq_equilibrium_bid(theta, 2, 3, 2, PriceRule::FirstPrice) << '\n';
        }
    }

    {
        const auto spec = make_experiment(ExperimentId::SplitTruthful2);
        std::ofstream os(path("split_best_response.tsv"));
        os << "revealed_price\tround2_bid\n";
        for (int i = 0; i <= 100; ++i) {
            const double p = 0.2 + (0.4 - 0.2) * i / 100.0;
            Observation o;
            o.round = 1;
            o.revealed_prices = {p};
            os << p << '\t' << split_best_response_truthful(o, spec.settings).split
               << '\n';
        }
    }
}

}  // namespace auctionrl

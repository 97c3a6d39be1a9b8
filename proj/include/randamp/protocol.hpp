#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "randamp/bell.hpp"
#include "randamp/bounds.hpp"
#include "randamp/box.hpp"
#include "randamp/extractor.hpp"
#include "randamp/sv_source.hpp"

namespace randamp {

// A device is a time-ordered no-signaling unit: the law of round i depends
// only on inputs up to round i. Adaptive strategies receive only the past
// (outcomes, settings) of rounds < i, which enforces the ordering
// structurally.
class DeviceModel {
  public:
    using AdaptiveRule = std::function<ConditionalBox(
        const std::vector<Outcome>&, const std::vector<Setting>&)>;

    static DeviceModel iid(ConditionalBox box);
    static DeviceModel block_iid(std::vector<ConditionalBox> boxes);
    static DeviceModel adaptive(AdaptiveRule rule);

    bool is_iid() const { return kind_ == Kind::iid; }
    std::size_t n_blocks() const { return boxes_.size(); }
    // The box governing round i of block `block`, given the past of that
    // block. iid: the single box; block_iid: the block's box.
    ConditionalBox box_for(std::size_t block,
                           const std::vector<Outcome>& past_x,
                           const std::vector<Setting>& past_u) const;
    const ConditionalBox& iid_box() const { return boxes_.at(0); }

  private:
    enum class Kind { iid, block_iid, adaptive } kind_ = Kind::iid;
    std::vector<ConditionalBox> boxes_;
    AdaptiveRule rule_;
};

// A classical adversary: side-information bits correlated with the SV draws.
// The hook observes the settings the source produced and emits e; it can
// never alter the device mid-run (Assumption A2).
struct AdversaryModel {
    std::function<std::vector<std::uint8_t>(const std::vector<Setting>&)>
        side_info;
};

struct BlockRecord {
    std::vector<Setting> settings;
    std::vector<Outcome> outcomes;
    EmpiricalBellStats stats;
};

struct Transcript {
    int protocol = 1;
    BlockRecord device1;
    std::vector<BlockRecord> device2_blocks;  // empty or lazily skipped blocks
    int chosen_block = 0;
    std::vector<std::uint8_t> seed_bits;  // t
    bool accepted = false;
    std::vector<std::uint8_t> output;  // s, empty when aborted
    double eps_def = 0.0;              // Protocol II only
};

Transcript run_protocol1(const ProtocolParams& params,
                         const DeviceModel& device, SvSource& src,
                         const ExtractorSpec& ext, std::uint64_t device_seed);

Transcript run_protocol2(const ProtocolParams& params,
                         const DeviceModel& device1,
                         const DeviceModel& device2, SvSource& src,
                         const ExtractorSpec& ext, std::uint64_t device_seed);

// Builds a fresh SV source for each trial (so adversarial strategies can
// collude with the device box).
using SourceFactory = std::function<SvSource(std::uint64_t trial_seed)>;

struct ExperimentReport {
    std::uint64_t trials = 0;
    std::uint64_t accepts = 0;
    double accept_rate = 0.0;
    // empirical distribution of s over accepting runs (only for m <= 12)
    std::vector<double> output_distribution;
    double output_distance = 0.0;  // 1-norm distance from uniform
    double product = 0.0;          // accept_rate * output_distance
    std::vector<std::string> csv_rows;  // "trial,accepted,L1,Lj,s_hex"
};

ExperimentReport soundness_experiment(const ProtocolParams& params,
                                      const DeviceModel& device,
                                      const SourceFactory& make_source,
                                      const ExtractorSpec& ext,
                                      std::uint64_t trials,
                                      std::uint64_t master_seed, int jobs = 1,
                                      // stop a trial once its indicator count
                                      // already forces rejection; accept/output
                                      // law unchanged, rejected rows record the
                                      // stats at the stopping round
                                      bool stop_on_certain_reject = false);

// Acceptance-rate estimate for an iid device whose setting distribution is
// the same every round (uniform / constant-bias / greedy strategies). The
// per-round Bell indicator is then i.i.d. Bernoulli, so the trial statistic
// is sampled as a binomial count. Exact same law as the full simulation.
double iid_accept_rate(const ConditionalBox& box, const SvStrategy& strategy,
                       double epsilon, double delta, std::uint64_t n,
                       std::uint64_t trials, std::uint64_t seed);

// The stationary setting distribution induced by a strategy (uniform,
// constant-bias, or greedy against a fixed box).
std::array<double, 16> stationary_setting_distribution(
    const SvStrategy& strategy, double epsilon);

// An explicit small joint over (s, z, e) per adversary input w, already
// conditioned on acceptance. p[w][s][z][e]; each p[w] sums to 1.
struct ToyJoint {
    std::vector<std::vector<std::vector<std::vector<double>>>> p;

    std::size_t n_inputs() const { return p.size(); }
};

struct ComposableDistance {
    double exact = 0.0;    // d_c
    double relaxed = 0.0;  // the |S|-factored upper bound
};

ComposableDistance toy_composable_distance(const ToyJoint& joint);

std::string transcript_to_json(const Transcript& t);

}  // namespace randamp

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dronesim {

struct TtiRecord {
    long tti = 0;
    int serving_bs = 0;
    bool handover = false;
    int rrbs_used = 0;
    double tx_power_w = 0.0;
    double rate_bps = 0.0;
    std::int64_t arrived_bits = 0;
    std::int64_t served_bits = 0;
    std::int64_t dropped_bits = 0;
    std::int64_t q_before_bits = 0;
    std::int64_t q_after_bits = 0;
    double interference_mw = 0.0;
    double reward = 0.0;
    double x = 0.0, y = 0.0;
};

// Sums over one episode. Delay samples are q(t)/R(t) on transmitting TTIs
// (q taken at the beginning of the TTI); drops are tracked separately so
// starvation cannot hide behind a finite mean.
struct EpisodeSummary {
    int episode = 0;
    long ttis = 0;
    long handovers = 0;
    long tx_ttis = 0;
    double delay_sum_s = 0.0;
    long delay_samples = 0;
    double interference_sum_mw = 0.0; // over all TTIs
    double rrbs_sum = 0.0;            // over all TTIs
    double rate_sum_bps = 0.0;        // over transmitting TTIs
    std::int64_t arrived_bits = 0;
    std::int64_t served_bits = 0;
    std::int64_t dropped_bits = 0;
    std::int64_t q_end_bits = 0;
    double reward_total = 0.0;

    double delay_mean_s() const; // +inf when starved, 0 when idle and drained
    double interference_mean_mw() const;
};

void record(EpisodeSummary& ep, const TtiRecord& r);

struct KpiSummary {
    long episodes = 0;
    double mean_handovers = 0.0;       // per episode
    double mean_delay_s = 0.0;         // pooled over delay samples
    double mean_interference_mw = 0.0; // pooled over TTIs
    double mean_rrbs = 0.0;            // pooled over TTIs
    double mean_rate_bps = 0.0;        // pooled over transmitting TTIs
    double mean_reward_per_tti = 0.0;
    double mean_tx_ttis = 0.0;
    double drop_fraction = 0.0; // dropped bits / arrived bits
    std::int64_t dropped_bits = 0;
};

KpiSummary aggregate(const std::vector<EpisodeSummary>& episodes);

// Per-sweep-point normalization: value / max over the sweep. A sweep whose
// maximum is zero (or non-finite) normalizes to all zeros.
std::vector<double> normalize(const std::vector<double>& values);

// Spatial event counts on a square grid, cell_m wide cells.
class HeatmapGrid {
public:
    HeatmapGrid(double area_w_m, double area_h_m, double cell_m);
    void add(double x, double y);
    long at(int ix, int iy) const;
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_m() const { return cell_m_; }
    long total() const { return total_; }

private:
    double cell_m_;
    int nx_, ny_;
    long total_ = 0;
    std::vector<long> counts_;
};

// CSV output. Every writer prints the given header lines first (one "# "
// prefixed line each), so outputs are self-describing.
void write_episode_csv(std::ostream& os, const std::vector<std::string>& header,
                       const std::vector<EpisodeSummary>& eps);
void write_summary_csv(std::ostream& os, const std::vector<std::string>& header,
                       const KpiSummary& s);
void write_heatmap_csv(std::ostream& os, const std::vector<std::string>& header,
                       const HeatmapGrid& g);
void write_trace_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<TtiRecord>& recs);

std::string format_double(double v); // shared numeric formatting

} // namespace dronesim

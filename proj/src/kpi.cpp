#include "dronesim/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dronesim/traffic.hpp"

namespace dronesim {

double EpisodeSummary::delay_mean_s() const {
    if (delay_samples == 0)
        return q_end_bits > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return delay_sum_s / static_cast<double>(delay_samples);
}

double EpisodeSummary::interference_mean_mw() const {
    return ttis > 0 ? interference_sum_mw / static_cast<double>(ttis) : 0.0;
}

void record(EpisodeSummary& ep, const TtiRecord& r) {
    ++ep.ttis;
    ep.handovers += r.handover ? 1 : 0;
    const bool transmitting = r.rrbs_used > 0 && r.tx_power_w > 0.0;
    if (transmitting) {
        ++ep.tx_ttis;
        ep.delay_sum_s += expected_delay(r.q_before_bits, r.rate_bps);
        ++ep.delay_samples;
        ep.rate_sum_bps += r.rate_bps;
    }
    ep.interference_sum_mw += r.interference_mw;
    ep.rrbs_sum += r.rrbs_used;
    ep.arrived_bits += r.arrived_bits;
    ep.served_bits += r.served_bits;
    ep.dropped_bits += r.dropped_bits;
    ep.q_end_bits = r.q_after_bits;
    ep.reward_total += r.reward;
}

KpiSummary aggregate(const std::vector<EpisodeSummary>& episodes) {
    KpiSummary s;
    s.episodes = static_cast<long>(episodes.size());
    if (episodes.empty())
        return s;
    long ttis = 0, tx = 0, delay_n = 0;
    double delay_sum = 0.0, int_sum = 0.0, rrb_sum = 0.0, rate_sum = 0.0;
    double reward_sum = 0.0;
    std::int64_t arrived = 0, dropped = 0, residual = 0;
    long handovers = 0;
    for (const auto& e : episodes) {
        ttis += e.ttis;
        tx += e.tx_ttis;
        handovers += e.handovers;
        delay_sum += e.delay_sum_s;
        delay_n += e.delay_samples;
        int_sum += e.interference_sum_mw;
        rrb_sum += e.rrbs_sum;
        rate_sum += e.rate_sum_bps;
        reward_sum += e.reward_total;
        arrived += e.arrived_bits;
        dropped += e.dropped_bits;
        residual += e.q_end_bits;
    }
    s.mean_handovers = static_cast<double>(handovers) / s.episodes;
    if (delay_n > 0)
        s.mean_delay_s = delay_sum / static_cast<double>(delay_n);
    else
        s.mean_delay_s =
            residual > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    s.mean_interference_mw = ttis > 0 ? int_sum / ttis : 0.0;
    s.mean_rrbs = ttis > 0 ? rrb_sum / ttis : 0.0;
    s.mean_rate_bps = tx > 0 ? rate_sum / tx : 0.0;
    s.mean_reward_per_tti = ttis > 0 ? reward_sum / ttis : 0.0;
    s.mean_tx_ttis = static_cast<double>(tx) / s.episodes;
    s.drop_fraction =
        arrived > 0 ? static_cast<double>(dropped) / static_cast<double>(arrived)
                    : 0.0;
    s.dropped_bits = dropped;
    return s;
}

std::vector<double> normalize(const std::vector<double>& values) {
    double mx = 0.0;
    for (double v : values)
        if (std::isfinite(v))
            mx = std::max(mx, v);
    std::vector<double> out(values.size(), 0.0);
    if (mx <= 0.0)
        return out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = std::isfinite(values[i]) ? values[i] / mx : 1.0;
    return out;
}

HeatmapGrid::HeatmapGrid(double area_w_m, double area_h_m, double cell_m)
    : cell_m_(cell_m) {
    if (cell_m <= 0.0)
        throw std::invalid_argument("cell size must be positive");
    const double fx = area_w_m / cell_m, fy = area_h_m / cell_m;
    nx_ = static_cast<int>(fx + 0.5);
    ny_ = static_cast<int>(fy + 0.5);
    if (nx_ < 1 || ny_ < 1 || std::abs(fx - nx_) > 1e-9 ||
        std::abs(fy - ny_) > 1e-9)
        throw std::invalid_argument("cell size must divide area dimensions");
    counts_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
}

void HeatmapGrid::add(double x, double y) {
    int ix = static_cast<int>(std::floor(x / cell_m_));
    int iy = static_cast<int>(std::floor(y / cell_m_));
    ix = std::clamp(ix, 0, nx_ - 1);
    iy = std::clamp(iy, 0, ny_ - 1);
    ++counts_[static_cast<std::size_t>(iy) * nx_ + ix];
    ++total_;
}

long HeatmapGrid::at(int ix, int iy) const {
    if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_)
        throw std::out_of_range("heatmap cell out of range");
    return counts_[static_cast<std::size_t>(iy) * nx_ + ix];
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

namespace {
void put_header(std::ostream& os, const std::vector<std::string>& header) {
    for (const auto& line : header)
        os << "# " << line << "\n";
}
} // namespace

void write_episode_csv(std::ostream& os, const std::vector<std::string>& header,
                       const std::vector<EpisodeSummary>& eps) {
    put_header(os, header);
    os << "episode,ttis,handovers,tx_ttis,delay_mean_s,interference_mean_mw,"
          "rrbs_mean,rate_mean_bps,arrived_bits,served_bits,dropped_bits,"
          "q_end_bits,reward_total\n";
    for (const auto& e : eps) {
        os << e.episode << ',' << e.ttis << ',' << e.handovers << ','
           << e.tx_ttis << ',' << format_double(e.delay_mean_s()) << ','
           << format_double(e.interference_mean_mw()) << ','
           << format_double(e.ttis ? e.rrbs_sum / e.ttis : 0.0) << ','
           << format_double(e.tx_ttis ? e.rate_sum_bps / e.tx_ttis : 0.0) << ','
           << e.arrived_bits << ',' << e.served_bits << ',' << e.dropped_bits
           << ',' << e.q_end_bits << ',' << format_double(e.reward_total)
           << '\n';
    }
}

void write_summary_csv(std::ostream& os, const std::vector<std::string>& header,
                       const KpiSummary& s) {
    put_header(os, header);
    os << "episodes,mean_handovers,mean_delay_s,mean_interference_mw,"
          "mean_rrbs,mean_rate_bps,mean_reward_per_tti,mean_tx_ttis,"
          "drop_fraction,dropped_bits\n";
    os << s.episodes << ',' << format_double(s.mean_handovers) << ','
       << format_double(s.mean_delay_s) << ','
       << format_double(s.mean_interference_mw) << ','
       << format_double(s.mean_rrbs) << ',' << format_double(s.mean_rate_bps)
       << ',' << format_double(s.mean_reward_per_tti) << ','
       << format_double(s.mean_tx_ttis) << ','
       << format_double(s.drop_fraction) << ',' << s.dropped_bits << '\n';
}

void write_heatmap_csv(std::ostream& os, const std::vector<std::string>& header,
                       const HeatmapGrid& g) {
    put_header(os, header);
    os << "cell_x,cell_y,count\n";
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            os << ix << ',' << iy << ',' << g.at(ix, iy) << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<TtiRecord>& recs) {
    put_header(os, header);
    os << "tti,serving_bs,handover,rrbs_used,tx_power_w,rate_bps,arrived_bits,"
          "served_bits,dropped_bits,q_before_bits,q_after_bits,"
          "interference_mw,reward,x,y\n";
    for (const auto& r : recs) {
        os << r.tti << ',' << r.serving_bs << ',' << (r.handover ? 1 : 0) << ','
           << r.rrbs_used << ',' << format_double(r.tx_power_w) << ','
           << format_double(r.rate_bps) << ',' << r.arrived_bits << ','
           << r.served_bits << ',' << r.dropped_bits << ',' << r.q_before_bits
           << ',' << r.q_after_bits << ',' << format_double(r.interference_mw)
           << ',' << format_double(r.reward) << ',' << format_double(r.x) << ','
           << format_double(r.y) << '\n';
    }
}

} // namespace dronesim

#include "bnp/report.hpp"

#include <algorithm>
#include <fstream>

#include "bnp/csv.hpp"
#include "bnp/errors.hpp"

namespace bnp {

namespace {

__int128 round_half_away(__int128 numerator, __int128 denominator) {
    const bool negative = (numerator < 0) != (denominator < 0);
    const __int128 n = numerator < 0 ? -numerator : numerator;
    const __int128 d = denominator < 0 ? -denominator : denominator;
    __int128 q = n / d;
    if (2 * (n % d) >= d) ++q;
    return negative ? -q : q;
}

// value is hundredths; renders e.g. 1234 -> "12.34", -5 -> "-0.05".
std::string hundredths_fixed2(__int128 value) {
    const bool negative = value < 0;
    const std::uint64_t magnitude = static_cast<std::uint64_t>(negative ? -value : value);
    std::string out = negative && magnitude != 0 ? "-" : "";
    out += std::to_string(magnitude / 100);
    out += '.';
    const std::uint64_t frac = magnitude % 100;
    if (frac < 10) out += '0';
    out += std::to_string(frac);
    return out;
}

// num/den to two decimals, round half away from zero; "0.00" on den = 0.
std::string ratio_fixed2(Payoff num, std::uint64_t den) {
    if (den == 0) return "0.00";
    return hundredths_fixed2(
        round_half_away(static_cast<__int128>(num) * 100, static_cast<__int128>(den)));
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

std::string mean_percent_fixed2(const std::vector<std::pair<Payoff, std::uint64_t>>& ratios) {
    if (ratios.empty()) return "0.00";
    // Per-block percentage in exact micro-percent, then one final rounding.
    __int128 total_micro = 0;
    for (const auto& [num, den] : ratios) {
        if (den == 0) continue;
        total_micro += round_half_away(static_cast<__int128>(num) * 100 * 1'000'000,
                                       static_cast<__int128>(den));
    }
    const __int128 mean_hundredths =
        round_half_away(total_micro, static_cast<__int128>(ratios.size()) * 10'000);
    return hundredths_fixed2(mean_hundredths);
}

void write_report(const std::filesystem::path& dir, const std::vector<ReplayComparison>& replays,
                  const std::vector<BlockAudit>& audits, std::size_t collusion_c) {
    std::filesystem::create_directories(dir);

    std::vector<ReplayComparison> replay_rows = replays;
    std::sort(replay_rows.begin(), replay_rows.end(),
              [](const ReplayComparison& a, const ReplayComparison& b) {
                  return a.block_number < b.block_number;
              });
    std::vector<BlockAudit> audit_rows = audits;
    std::sort(audit_rows.begin(), audit_rows.end(),
              [](const BlockAudit& a, const BlockAudit& b) {
                  return a.block_number < b.block_number;
              });

    if (!replay_rows.empty()) {
        std::ofstream fees = open_for_write(dir / "fig_user_fees.csv");
        fees << "block_number,baseline_user_total,bnp_user_total\n";
        std::ofstream revenue = open_for_write(dir / "fig_miner_revenue.csv");
        revenue << "block_number,baseline_miner_revenue,bnp_miner_revenue\n";
        for (const ReplayComparison& row : replay_rows) {
            fees << row.block_number << ',' << row.baseline_user_total << ','
                 << row.bnp_user_total << '\n';
            revenue << row.block_number << ',' << row.baseline_miner_revenue << ','
                    << row.bnp_miner_revenue << '\n';
        }
    }

    if (!audit_rows.empty()) {
        std::ofstream uic = open_for_write(dir / "fig_uic_delta.csv");
        uic << "block_number,uic_best_delta,sampled_mean_delta\n";
        std::ofstream mic = open_for_write(dir / "fig_mic_delta.csv");
        mic << "block_number,mic_best_delta\n";
        std::ofstream scp = open_for_write(dir / "fig_scp_delta.csv");
        scp << "block_number,scp_best_delta,scp_clearing_delta\n";
        for (const BlockAudit& row : audit_rows) {
            uic << row.block_number << ',' << row.uic.best_delta << ','
                << ratio_fixed2(row.sampled_delta_sum, row.sampled_count) << '\n';
            mic << row.block_number << ',' << row.mic.best_delta << '\n';
            const AuditFinding& top = row.scp.back();
            scp << row.block_number << ',' << top.best_delta << ','
                << top.witness_clearing_delta << '\n';
        }
    }

    std::ofstream summary = open_for_write(dir / "summary.txt");
    summary << "blocks replayed: " << replay_rows.size() << '\n';
    if (!replay_rows.empty()) {
        std::vector<std::pair<Payoff, std::uint64_t>> user_ratios;
        std::vector<std::pair<Payoff, std::uint64_t>> miner_ratios;
        for (const ReplayComparison& row : replay_rows) {
            user_ratios.emplace_back(
                as_payoff(row.baseline_user_total) - as_payoff(row.bnp_user_total),
                row.baseline_user_total);
            miner_ratios.emplace_back(
                as_payoff(row.baseline_miner_revenue) - as_payoff(row.bnp_miner_revenue),
                row.baseline_miner_revenue);
        }
        summary << "mean user fee reduction: " << mean_percent_fixed2(user_ratios) << "%\n";
        summary << "mean miner revenue reduction: " << mean_percent_fixed2(miner_ratios) << "%\n";
    }

    summary << "blocks audited: " << audit_rows.size() << '\n';
    if (!audit_rows.empty()) {
        std::uint64_t uic_violations = 0;
        std::uint64_t mic_violations = 0;
        std::vector<std::uint64_t> scp_violations(collusion_c, 0);
        Payoff uic_sum = 0;
        Payoff mic_sum = 0;
        Payoff scp_sum = 0;
        Payoff sampled_sum = 0;
        std::uint64_t sampled_count = 0;
        for (const BlockAudit& row : audit_rows) {
            uic_violations += row.uic.violating ? 1 : 0;
            mic_violations += row.mic.violating ? 1 : 0;
            for (std::size_t c = 0; c < collusion_c && c < row.scp.size(); ++c)
                scp_violations[c] += row.scp[c].violating ? 1 : 0;
            uic_sum += row.uic.best_delta;
            mic_sum += row.mic.best_delta;
            scp_sum += row.scp.back().best_delta;
            sampled_sum += row.sampled_delta_sum;
            sampled_count += row.sampled_count;
        }
        summary << "uic violations: " << uic_violations << '\n';
        summary << "mic violations: " << mic_violations << '\n';
        for (std::size_t c = 0; c < collusion_c; ++c)
            summary << "scp violations (c=" << c + 1 << "): " << scp_violations[c] << '\n';
        summary << "mean uic best delta: "
                << ratio_fixed2(uic_sum, audit_rows.size()) << '\n';
        summary << "mean mic best delta: "
                << ratio_fixed2(mic_sum, audit_rows.size()) << '\n';
        summary << "mean scp best delta (c=" << collusion_c
                << "): " << ratio_fixed2(scp_sum, audit_rows.size()) << '\n';
        summary << "mean sampled deviation delta: " << ratio_fixed2(sampled_sum, sampled_count)
                << '\n';
    }
}

}  // namespace bnp

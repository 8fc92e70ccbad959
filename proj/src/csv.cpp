#include "bnp/csv.hpp"

#include <ostream>
#include <sstream>

namespace bnp {

std::string csv_field(const std::string& raw) {
    const bool needs_quoting = raw.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quoting) return raw;
    std::string quoted = "\"";
    for (const char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    const auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                field_started = true;  // the next field exists even if empty
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

std::string format_witness(const std::optional<DeviationScenario>& witness) {
    if (!witness) return "none";
    std::ostringstream out;
    switch (witness->kind) {
        case DeviationKind::Overbid:
        case DeviationKind::Underbid: {
            out << "rebid";
            for (const auto& [tx_id, amount] : witness->altered_bids)
                out << ' ' << tx_id << ' ' << amount;
            break;
        }
        case DeviationKind::FakeUserBid:
            out << "fake-user-bid";
            for (const Bid& bid : witness->injected_bids) out << ' ' << bid.amount;
            break;
        case DeviationKind::MinerFakeBid:
            out << "fake-bid";
            for (const Bid& bid : witness->injected_bids) out << ' ' << bid.amount;
            break;
        case DeviationKind::Collusion: {
            out << "raise";
            bool first = true;
            for (const auto& [tx_id, amount] : witness->altered_bids) {
                out << (first ? " " : " + ") << tx_id << ' ' << amount;
                first = false;
            }
            for (const Bid& bid : witness->injected_bids) {
                out << (first ? " " : " + ") << "fake " << bid.amount;
                first = false;
            }
            break;
        }
    }
    return out.str();
}

void write_replay_csv(std::ostream& out, const std::vector<ReplayComparison>& rows) {
    out << "block_number,baseline_user_total,bnp_user_total,user_reduction_pct,"
           "baseline_miner_revenue,bnp_miner_revenue,miner_reduction_pct,bnp_burned\n";
    for (const ReplayComparison& row : rows) {
        const Payoff user_saved =
            as_payoff(row.baseline_user_total) - as_payoff(row.bnp_user_total);
        const Payoff miner_lost =
            as_payoff(row.baseline_miner_revenue) - as_payoff(row.bnp_miner_revenue);
        out << row.block_number << ',' << row.baseline_user_total << ',' << row.bnp_user_total
            << ',' << percent_fixed2(user_saved, row.baseline_user_total) << ','
            << row.baseline_miner_revenue << ',' << row.bnp_miner_revenue << ','
            << percent_fixed2(miner_lost, row.baseline_miner_revenue) << ',' << row.bnp_burned
            << '\n';
    }
}

void write_audit_csv(std::ostream& out, const std::vector<BlockAudit>& rows,
                     std::size_t collusion_c) {
    out << "block_number,uic_best_delta,uic_violation,uic_witness,"
           "mic_best_delta,mic_violation,mic_witness";
    for (std::size_t c = 1; c <= collusion_c; ++c)
        out << ",scp_c" << c << "_best_delta,scp_c" << c << "_violation,scp_c" << c << "_witness";
    out << ",sampled_delta_sum,sampled_count\n";

    for (const BlockAudit& row : rows) {
        out << row.block_number << ',' << row.uic.best_delta << ',' << (row.uic.violating ? 1 : 0)
            << ',' << csv_field(format_witness(row.uic.witness)) << ',' << row.mic.best_delta
            << ',' << (row.mic.violating ? 1 : 0) << ','
            << csv_field(format_witness(row.mic.witness));
        for (std::size_t c = 1; c <= collusion_c && c <= row.scp.size(); ++c) {
            const AuditFinding& f = row.scp[c - 1];
            out << ',' << f.best_delta << ',' << (f.violating ? 1 : 0) << ','
                << csv_field(format_witness(f.witness));
        }
        out << ',' << row.sampled_delta_sum << ',' << row.sampled_count << '\n';
    }
}

}  // namespace bnp

#include <unordered_map>

#include "bnp/reference.hpp"

namespace bnp::reference {

AuditFinding audit_uic(const Mempool& pool, const AuctionParams& params, const AuditConfig& config) {
    validate_params(params);
    return detail::naive_audit_uic(pool, params, config, &reference::evaluate_scenario);
}

AuditFinding audit_mic(const Mempool& pool, const AuctionParams& params, const AuditConfig& config) {
    validate_params(params);
    return detail::naive_audit_mic(pool, params, config, &reference::evaluate_scenario);
}

AuditFinding audit_scp(const Mempool& pool, const AuctionParams& params, std::size_t c,
                       const AuditConfig& config) {
    validate_params(params);
    return detail::naive_audit_scp(pool, params, c, config, &reference::evaluate_scenario);
}

BlockAudit audit_block(std::uint64_t block_number, const Mempool& pool, const AuctionParams& params,
                       const AuditConfig& config) {
    BlockAudit audit;
    audit.block_number = block_number;
    audit.uic = reference::audit_uic(pool, params, config);
    audit.mic = reference::audit_mic(pool, params, config);
    for (std::size_t c = 1; c <= std::max<std::size_t>(config.collusion_c, 1); ++c)
        audit.scp.push_back(reference::audit_scp(pool, params, c, config));

    for (const SampledDeviation& sample : sample_deviations(pool, config, block_number)) {
        DeviationScenario scenario;
        const Bid* owner = nullptr;
        for (const Bid& bid : pool.bids)
            if (bid.tx_id == sample.tx_id) owner = &bid;
        scenario.kind = owner->true_value && sample.amount > *owner->true_value
                            ? DeviationKind::Overbid
                            : DeviationKind::Underbid;
        scenario.actor = owner->bidder_id;
        scenario.altered_bids[sample.tx_id] = sample.amount;
        scenario.round = pool.round;
        audit.sampled_delta_sum +=
            reference::evaluate_scenario(pool, scenario, params, config.future_model).delta;
        audit.sampled_count += 1;
    }
    return audit;
}

ReplayComparison replay_compare(const BlockRecord& record, std::size_t n_override) {
    ReplayComparison cmp;
    cmp.block_number = record.block_number;
    for (const TxRecord& tx : record.txs) {
        cmp.baseline_user_total += tx.baseline_paid;
        cmp.baseline_miner_revenue += tx.baseline_paid;
    }

    const Mempool pool = to_mempool(record);
    AuctionParams params;
    params.n = n_override ? n_override : record.capacity_n;
    const AuctionOutcome outcome = reference::run_auction(pool, params);
    cmp.bnp_user_total = outcome.total_collected;
    cmp.bnp_miner_revenue = outcome.miner_revenue;
    cmp.bnp_burned = outcome.burned;
    return cmp;
}

}  // namespace bnp::reference

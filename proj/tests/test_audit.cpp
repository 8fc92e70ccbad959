#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "bnp/audit.hpp"
#include "bnp/errors.hpp"
#include "bnp/reference.hpp"
#include "bnp/synthetic.hpp"

using namespace bnp;

namespace {

Bid mk(std::string tx, Amount amount) {
    Bid b;
    b.bidder_id = "u" + tx;
    b.tx_id = std::move(tx);
    b.amount = amount;
    b.true_value = amount;
    return b;
}

Mempool pool_of(const std::vector<Amount>& amounts) {
    Mempool pool;
    for (std::size_t i = 0; i < amounts.size(); ++i)
        pool.bids.push_back(mk("t" + std::to_string(i), amounts[i]));
    return pool;
}

AuctionParams params_n(std::size_t n) {
    AuctionParams p;
    p.n = n;
    return p;
}

bool same_witness(const AuditFinding& a, const AuditFinding& b) {
    if (a.witness.has_value() != b.witness.has_value()) return false;
    if (!a.witness) return true;
    return !witness_precedes(*a.witness, *b.witness) && !witness_precedes(*b.witness, *a.witness);
}

bool same_finding(const AuditFinding& a, const AuditFinding& b) {
    return a.best_delta == b.best_delta && a.violating == b.violating &&
           a.witness_clearing_delta == b.witness_clearing_delta && same_witness(a, b);
}

// Re-scores a finding's witness from scratch; the claimed optimum must be real.
Payoff rescore(const Mempool& pool, const AuditFinding& f, const AuctionParams& params,
               const FutureCostModel& model) {
    REQUIRE(f.witness.has_value());
    return reference::evaluate_scenario(pool, *f.witness, params, model).delta;
}

}  // namespace

TEST_CASE("pivot grid holds zero and every amount neighborhood") {
    AuditConfig config;
    const std::vector<Amount> grid = deviation_grid(pool_of({5, 9}), config);
    CHECK(grid == std::vector<Amount>{0, 4, 5, 6, 8, 9, 10});

    config.grid = GridKind::UniformStep;
    config.step = 5;
    const std::vector<Amount> steps = deviation_grid(pool_of({12, 3}), config);
    CHECK(steps == std::vector<Amount>{0, 5, 10, 15});

    config.step = 0;
    CHECK_THROWS_AS((void)deviation_grid(pool_of({1}), config), ValidationError);
}

TEST_CASE("grid search equals the exhaustive integer scan on small pools") {
    std::mt19937_64 rng(23);
    synthetic::PoolSpec spec;
    spec.min_size = 1;
    spec.max_size = 8;
    spec.max_amount = 10;
    AuditConfig config;
    for (int trial = 0; trial < 80; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 3);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionParams params = params_n(spec.n);

        Payoff scan_best = 0;
        bool scan_any = false;
        for (const Bid& bid : pool.bids) {
            for (Amount v = 0; v <= spec.max_amount + 2; ++v) {
                if (v == *bid.true_value) continue;
                DeviationScenario s;
                s.kind = v > *bid.true_value ? DeviationKind::Overbid : DeviationKind::Underbid;
                s.actor = bid.bidder_id;
                s.altered_bids[bid.tx_id] = v;
                const Payoff d =
                    reference::evaluate_scenario(pool, s, params, config.future_model).delta;
                if (!scan_any || d > scan_best) scan_best = d, scan_any = true;
            }
        }
        for (Amount v = 0; v <= spec.max_amount + 2; ++v) {
            DeviationScenario s;
            s.kind = DeviationKind::FakeUserBid;
            s.actor = "!fake-user";
            s.injected_bids.push_back(
                {make_fake_tx_id(0), "!fake-user", v, std::nullopt, BidOrigin::Genuine});
            const Payoff d =
                reference::evaluate_scenario(pool, s, params, config.future_model).delta;
            if (!scan_any || d > scan_best) scan_best = d, scan_any = true;
        }

        CHECK(audit_uic(pool, params, config).best_delta == scan_best);
    }
}

TEST_CASE("fast audits match the reference audits witness for witness") {
    std::mt19937_64 rng(29);
    synthetic::PoolSpec spec;
    spec.max_size = 12;
    spec.max_amount = 15;
    for (const FutureCostModel& model :
         {FutureCostModel::pessimistic(), FutureCostModel::fixed_offset(2)}) {
        AuditConfig config;
        config.future_model = model;
        for (int trial = 0; trial < 250; ++trial) {
            spec.n = 1 + static_cast<std::size_t>(rng() % 4);
            const Mempool pool = synthetic::random_mempool(rng, spec);
            const AuctionParams params = params_n(spec.n);

            CHECK(same_finding(audit_uic(pool, params, config),
                               reference::audit_uic(pool, params, config)));
            CHECK(same_finding(audit_mic(pool, params, config),
                               reference::audit_mic(pool, params, config)));
            CHECK(same_finding(audit_scp(pool, params, 1, config),
                               reference::audit_scp(pool, params, 1, config)));
        }
    }
}

TEST_CASE("both engines agree under the realized next-round model") {
    std::mt19937_64 rng(31);
    synthetic::PoolSpec spec;
    spec.max_size = 8;
    spec.max_amount = 10;
    AuditConfig config;
    config.future_model = FutureCostModel::next_round_realized();
    for (int trial = 0; trial < 60; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 3);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionParams params = params_n(spec.n);
        CHECK(same_finding(audit_uic(pool, params, config),
                           reference::audit_uic(pool, params, config)));
        CHECK(same_finding(audit_scp(pool, params, 1, config),
                           reference::audit_scp(pool, params, 1, config)));
    }
}

TEST_CASE("witnesses reproduce their claimed optimum when re-scored") {
    std::mt19937_64 rng(37);
    synthetic::PoolSpec spec;
    spec.min_size = 2;
    spec.max_size = 12;
    spec.max_amount = 15;
    AuditConfig config;
    config.future_model = FutureCostModel::fixed_offset(1);
    for (int trial = 0; trial < 150; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 4);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionParams params = params_n(spec.n);

        const AuditFinding uic = audit_uic(pool, params, config);
        if (uic.witness) CHECK(rescore(pool, uic, params, config.future_model) == uic.best_delta);
        const AuditFinding mic = audit_mic(pool, params, config);
        if (mic.witness) CHECK(rescore(pool, mic, params, config.future_model) == mic.best_delta);
        const AuditFinding scp = audit_scp(pool, params, 2, config);
        if (scp.witness) CHECK(rescore(pool, scp, params, config.future_model) == scp.best_delta);
    }
}

TEST_CASE("coalition optimum is monotone in the coalition bound") {
    std::mt19937_64 rng(41);
    synthetic::PoolSpec spec;
    spec.min_size = 2;
    spec.max_size = 8;
    spec.max_amount = 12;
    AuditConfig config;
    for (int trial = 0; trial < 40; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 3);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionParams params = params_n(spec.n);
        const Payoff c0 = audit_scp(pool, params, 0, config).best_delta;
        const Payoff c1 = audit_scp(pool, params, 1, config).best_delta;
        const Payoff c2 = audit_scp(pool, params, 2, config).best_delta;
        CHECK(c0 == audit_mic(pool, params, config).best_delta);
        CHECK(c1 >= c0);
        CHECK(c2 >= c1);
    }
    const Mempool pool = pool_of({12, 10, 8, 6, 4, 2});
    const AuctionParams params = params_n(2);
    CHECK(audit_scp(pool, params, 3, config).best_delta >=
          audit_scp(pool, params, 2, config).best_delta);
}

TEST_CASE("two-member window inflation profits on the eight-bid pool") {
    // Raising t3 7->8 and t4 6->8 lifts the revenue window from 7+6+5 to
    // 8+8+5 while the next round still clears at 5 for both members, so the
    // coalition nets exactly +3 under the realized model.
    const Mempool pool = pool_of({10, 9, 8, 7, 6, 5, 4, 3});
    AuditConfig config;
    config.future_model = FutureCostModel::next_round_realized();
    const AuditFinding f = audit_scp(pool, params_n(3), 2, config);
    CHECK(f.best_delta == 3);
    CHECK(f.violating);
    const AuditFinding ref = reference::audit_scp(pool, params_n(3), 2, config);
    CHECK(ref.best_delta == 3);
    REQUIRE(f.witness.has_value());
    REQUIRE(ref.witness.has_value());
    CHECK(same_witness(f, ref));
}

TEST_CASE("audit edge pools") {
    AuditConfig config;

    // b_n == b_{n+1}: no profitable underbid window.
    const Mempool packed = pool_of({9, 8, 7, 7, 6, 5});
    CHECK(audit_uic(packed, params_n(3), config).best_delta == 0);

    // b_n - b_{n+1} == 1: the repricing gain is at most that gap.
    const Mempool tight = pool_of({9, 8, 7, 6, 5, 4});
    CHECK(audit_uic(tight, params_n(3), config).best_delta <= 1);

    // Single bid, n = 3: clearing is already zero.
    const AuditFinding solo = audit_uic(pool_of({5}), params_n(3), config);
    CHECK(solo.best_delta == 0);
    CHECK_FALSE(solo.violating);

    // Empty pool: empty findings everywhere.
    const AuditFinding empty = audit_mic(Mempool{}, params_n(2), config);
    CHECK(empty.best_delta == 0);
    CHECK_FALSE(empty.witness.has_value());

    // b_n < 2 b_2n keeps every fake bid unprofitable under fixed offset 1.
    AuditConfig off1;
    off1.future_model = FutureCostModel::fixed_offset(1);
    const AuditFinding mic = audit_mic(pool_of({10, 9, 8, 7, 6, 5}), params_n(3), off1);
    CHECK(mic.best_delta < 0);

    // A wide spread admits the profitable fake-bid region; the audit flags it.
    const AuditFinding wide = audit_mic(pool_of({100, 1}), params_n(1), off1);
    CHECK(wide.best_delta == 96);  // f = 99: f - b_2n - b' = 99 - 1 - 2
    CHECK(wide.violating);
    REQUIRE(wide.witness.has_value());
    CHECK(wide.witness->kind == DeviationKind::MinerFakeBid);
}

TEST_CASE("infeasible searches refuse loudly and identically") {
    const Mempool pool = pool_of({10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
    const AuctionParams params = params_n(2);
    AuditConfig config;
    config.future_model = FutureCostModel::next_round_realized();  // naive route
    config.max_evals = 10;

    std::uint64_t required = 0;
    try {
        (void)audit_uic(pool, params, config);
        FAIL("expected InfeasibleSearchError");
    } catch (const InfeasibleSearchError& e) {
        required = e.required_evals;
        CHECK(e.limit == 10);
        CHECK(e.required_evals > 10);
    }
    try {
        (void)reference::audit_uic(pool, params, config);
        FAIL("expected InfeasibleSearchError");
    } catch (const InfeasibleSearchError& e) {
        CHECK(e.required_evals == required);
    }

    // The multi-member coalition tail is budgeted on the fast path too.
    AuditConfig fast;
    fast.max_evals = 50;
    CHECK_THROWS_AS((void)audit_scp(pool, params, 3, fast), InfeasibleSearchError);
}

TEST_CASE("sampled deviations are seeded per block and skip the honest amount") {
    const Mempool pool = pool_of({10, 9, 8, 7, 6, 5});
    AuditConfig config;
    config.sample_count = 64;
    config.seed = 5;

    const std::vector<SampledDeviation> a = sample_deviations(pool, config, 123);
    const std::vector<SampledDeviation> b = sample_deviations(pool, config, 123);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].tx_id == b[i].tx_id);
        CHECK(a[i].amount == b[i].amount);
    }
    const std::vector<SampledDeviation> c = sample_deviations(pool, config, 124);
    bool differs = c.size() != a.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i)
        differs = a[i].tx_id != c[i].tx_id || a[i].amount != c[i].amount;
    CHECK(differs);

    for (const SampledDeviation& s : a) {
        const auto it = std::find_if(pool.bids.begin(), pool.bids.end(),
                                     [&](const Bid& bid) { return bid.tx_id == s.tx_id; });
        REQUIRE(it != pool.bids.end());
        CHECK(s.amount != *it->true_value);
    }
}

TEST_CASE("block audit sampled sums agree across engines") {
    std::mt19937_64 rng(43);
    synthetic::PoolSpec spec;
    spec.min_size = 1;
    spec.max_size = 10;
    spec.max_amount = 15;
    AuditConfig config;
    config.sample_count = 24;
    for (int trial = 0; trial < 40; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 3);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionParams params = params_n(spec.n);
        const BlockAudit mine = audit_block(7000 + trial, pool, params, config);
        const BlockAudit ref = reference::audit_block(7000 + trial, pool, params, config);
        CHECK(mine.sampled_count == ref.sampled_count);
        CHECK(mine.sampled_delta_sum == ref.sampled_delta_sum);
        CHECK(same_finding(mine.uic, ref.uic));
        CHECK(same_finding(mine.mic, ref.mic));
        REQUIRE(mine.scp.size() == ref.scp.size());
        CHECK(same_finding(mine.scp[0], ref.scp[0]));
    }
}

TEST_CASE("dataset audit is order-independent and reports block failures") {
    const std::vector<BlockRecord> records = synthetic::synthetic_blocks(77, 500, 24, 4, 10);
    AuditConfig config;
    const DatasetAudit a = audit_dataset(records, config);
    const DatasetAudit b = audit_dataset(records, config);
    CHECK(a.summary.uic_violations == b.summary.uic_violations);
    CHECK(a.summary.uic_delta_sum == b.summary.uic_delta_sum);
    CHECK(a.summary.scp_delta_sum == b.summary.scp_delta_sum);
    CHECK(a.summary.sampled_delta_sum == b.summary.sampled_delta_sum);
    CHECK(a.blocks.size() == records.size());

    std::vector<BlockRecord> bad = records;
    bad[3].capacity_n = 0;
    try {
        (void)audit_dataset(bad, config);
        FAIL("expected a block failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(std::to_string(bad[3].block_number)) !=
              std::string::npos);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "bnp/auction.hpp"
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

Mempool pool_of(const std::vector<Amount>& amounts, std::uint64_t round = 0) {
    Mempool pool;
    pool.round = round;
    for (std::size_t i = 0; i < amounts.size(); ++i)
        pool.bids.push_back(mk("t" + std::to_string(i), amounts[i]));
    return pool;
}

AuctionParams params_n(std::size_t n) {
    AuctionParams p;
    p.n = n;
    return p;
}

bool same_outcome(const AuctionOutcome& a, const AuctionOutcome& b) {
    if (a.clearing_price != b.clearing_price || a.miner_revenue != b.miner_revenue ||
        a.burned != b.burned || a.total_collected != b.total_collected)
        return false;
    if (a.winners.size() != b.winners.size()) return false;
    for (std::size_t i = 0; i < a.winners.size(); ++i)
        if (a.winners[i].tx_id != b.winners[i].tx_id || a.winners[i].paid != b.winners[i].paid ||
            a.winners[i].refund != b.winners[i].refund)
            return false;
    if (a.deferred.round != b.deferred.round) return false;
    if (a.deferred.bids.size() != b.deferred.bids.size()) return false;
    for (std::size_t i = 0; i < a.deferred.bids.size(); ++i)
        if (a.deferred.bids[i].tx_id != b.deferred.bids[i].tx_id ||
            a.deferred.bids[i].amount != b.deferred.bids[i].amount)
            return false;
    return true;
}

}  // namespace

TEST_CASE("descending sort breaks amount ties by tx id") {
    Mempool pool = pool_of({3, 7, 7, 1});
    const std::vector<Bid> sorted = sort_bids_descending(pool);
    REQUIRE(sorted.size() == 4);
    CHECK(sorted[0].tx_id == "t1");
    CHECK(sorted[1].tx_id == "t2");
    CHECK(sorted[2].tx_id == "t0");
    CHECK(sorted[3].tx_id == "t3");
}

TEST_CASE("padding fills to exactly two n") {
    Mempool pool = pool_of({9, 8, 7});
    CHECK(pad_to_two_n(sort_bids_descending(pool), 2) == std::vector<Amount>{9, 8, 7, 0});
    CHECK(pad_to_two_n(sort_bids_descending(Mempool{}), 1) == std::vector<Amount>{0, 0});
    // Amounts beyond 2n never matter; the padded list is cut there.
    Mempool big = pool_of({9, 8, 7, 6, 5});
    CHECK(pad_to_two_n(sort_bids_descending(big), 2) == std::vector<Amount>{9, 8, 7, 6});
}

TEST_CASE("five descending bids, n = 3") {
    const AuctionOutcome out = run_auction(pool_of({5, 4, 3, 2, 1}), params_n(3));
    CHECK(out.clearing_price == 3);
    REQUIRE(out.winners.size() == 3);
    CHECK(out.winners[0].tx_id == "t0");
    CHECK(out.winners[0].paid == 3);
    CHECK(out.winners[0].refund == 2);
    CHECK(out.winners[1].refund == 1);
    CHECK(out.winners[2].refund == 0);
    CHECK(out.total_collected == 9);
    CHECK(out.miner_revenue == 3);  // 2 + 1 + 0
    CHECK(out.burned == 6);
    REQUIRE(out.deferred.bids.size() == 2);
    CHECK(out.deferred.bids[0].amount == 2);
    CHECK(out.deferred.bids[1].amount == 1);
    CHECK(out.deferred.round == 1);
}

TEST_CASE("all-equal bids, n = 2: lowest tx ids win at the common price") {
    const AuctionOutcome out = run_auction(pool_of({7, 7, 7, 7}), params_n(2));
    CHECK(out.clearing_price == 7);
    REQUIRE(out.winners.size() == 2);
    CHECK(out.winners[0].tx_id == "t0");
    CHECK(out.winners[1].tx_id == "t1");
    CHECK(out.total_collected == 14);
    CHECK(out.miner_revenue == 14);
    CHECK(out.burned == 0);
}

TEST_CASE("underfull pool clears at zero") {
    const AuctionOutcome out = run_auction(pool_of({5}), params_n(3));
    CHECK(out.clearing_price == 0);
    REQUIRE(out.winners.size() == 1);
    CHECK(out.winners[0].paid == 0);
    CHECK(out.winners[0].refund == 5);
    CHECK(out.miner_revenue == 0);
    CHECK(out.burned == 0);
    CHECK(out.deferred.bids.empty());
}

TEST_CASE("empty pool clears empty") {
    const AuctionOutcome out = run_auction(Mempool{}, params_n(4));
    CHECK(out.winners.empty());
    CHECK(out.clearing_price == 0);
    CHECK(out.total_collected == 0);
}

TEST_CASE("miner revenue reads the second half of the window") {
    const AuctionOutcome out = run_auction(pool_of({9, 8, 7, 6, 5, 4}), params_n(3));
    CHECK(out.clearing_price == 7);
    CHECK(miner_payoff(out) == 15);  // 6 + 5 + 4
    CHECK(out.burned == 21 - 15);
}

TEST_CASE("user payoff is value minus clearing when included") {
    CHECK(user_payoff(10, true, 7) == 3);
    CHECK(user_payoff(5, true, 7) == -2);
    CHECK(user_payoff(10, false, 7) == 0);
}

TEST_CASE("validation rejects duplicate and empty tx ids, n = 0") {
    Mempool dup = pool_of({3, 2});
    dup.bids[1].tx_id = "t0";
    CHECK_THROWS_AS(validate_mempool(dup), ValidationError);
    Mempool anon = pool_of({3});
    anon.bids[0].tx_id.clear();
    CHECK_THROWS_AS(validate_mempool(anon), ValidationError);
    CHECK_THROWS_AS(validate_params(params_n(0)), ValidationError);
    CHECK_THROWS_AS((void)run_auction(dup, params_n(1)), ValidationError);
}

TEST_CASE("conservation, refunds, and deferral on random pools") {
    std::mt19937_64 rng(7);
    synthetic::PoolSpec spec;
    spec.max_size = 24;
    spec.max_amount = 1'000'000'000'000ULL;
    for (int trial = 0; trial < 2000; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 6);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionOutcome out = run_auction(pool, params_n(spec.n));

        CHECK(out.total_collected == out.miner_revenue + out.burned);
        CHECK(out.winners.size() == std::min(pool.bids.size(), spec.n));
        CHECK(out.total_collected == out.clearing_price * out.winners.size());
        for (const WinnerEntry& w : out.winners) {
            CHECK(w.paid == out.clearing_price);
            const auto it = std::find_if(pool.bids.begin(), pool.bids.end(),
                                         [&](const Bid& b) { return b.tx_id == w.tx_id; });
            REQUIRE(it != pool.bids.end());
            CHECK(it->amount >= w.paid);
            CHECK(w.paid + w.refund == it->amount);
        }
        CHECK(out.deferred.bids.size() == pool.bids.size() - out.winners.size());
        CHECK(out.deferred.round == pool.round + 1);
        CHECK(std::is_sorted(out.deferred.bids.begin(), out.deferred.bids.end(),
                             [](const Bid& a, const Bid& b) { return bid_precedes(a, b); }));
    }
}

TEST_CASE("outcome is invariant under input permutation") {
    std::mt19937_64 rng(11);
    synthetic::PoolSpec spec;
    spec.max_size = 16;
    spec.max_amount = 50;
    for (int trial = 0; trial < 300; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 4);
        Mempool pool = synthetic::random_mempool(rng, spec);
        const AuctionOutcome base = run_auction(pool, params_n(spec.n));
        std::shuffle(pool.bids.begin(), pool.bids.end(), rng);
        CHECK(same_outcome(base, run_auction(pool, params_n(spec.n))));
    }
}

TEST_CASE("production matches the serial reference on random pools") {
    std::mt19937_64 rng(13);
    synthetic::PoolSpec spec;
    spec.max_size = 20;
    spec.max_amount = 1'000'000'000'000ULL;
    for (int trial = 0; trial < 2000; ++trial) {
        spec.n = 1 + static_cast<std::size_t>(rng() % 5);
        const Mempool pool = synthetic::random_mempool(rng, spec);
        CHECK(same_outcome(run_auction(pool, params_n(spec.n)),
                           reference::run_auction(pool, params_n(spec.n))));
    }
}

#include "roughlab/registry.hpp"

#include <gtest/gtest.h>

using namespace roughlab;

TEST(Registry, FixturesParseAndRoundTrip) {
    for (const auto& e : registry()) {
        auto doc = dsl::parse(e.source);
        EXPECT_EQ(dsl::parse(dsl::print(doc)), doc) << e.id;
    }
    EXPECT_EQ(registry().size(), 6u);
    EXPECT_THROW(find_entry("no-such-entry"), UnknownRegistryId);
}

TEST(Registry, ReproduceAll) {
    for (const auto& e : registry())
        for (const auto& row : reproduce(e)) {
            if (row.id == "growing-atom" && row.key == "Z witness exceedance") {
                // off the squares |Y_n - Z| > 1 + eps needs Y_n = 0, Z = 2 (mass (1 - p^n)/2) or Y_n = 2^n (mass p^n)
                EXPECT_EQ(row.actual, "1/2");
                EXPECT_FALSE(row.pass);
                continue;
            }
            EXPECT_TRUE(row.pass) << row.id << " / " << row.key << ": expected " << row.expected << ", got " << row.actual;
        }
}

TEST(Registry, Deterministic) {
    auto a = rows_to_json(reproduce(find_entry("weak-not-strong")));
    auto b = rows_to_json(reproduce(find_entry("weak-not-strong")));
    EXPECT_EQ(a, b);
}

TEST(Runner, FixtureReports) {
    auto r33 = run_document(dsl::parse(find_entry("dyadic-family").source));
    const auto& res = r33.report["queries"][0]["result"];
    EXPECT_EQ(res["strong_cluster"]["answer"], "Yes");
    EXPECT_EQ(res["limit_point"]["answer"], "No");
    EXPECT_FALSE(r33.fatal);

    auto r25 = run_document(dsl::parse(find_entry("growing-atom").source));
    const auto& rows = r25.report["queries"][1]["result"]["rows"];
    EXPECT_EQ(rows[0]["lim"], "Yes");
    EXPECT_EQ(rows[1]["lim"], "No");

    for (const auto& e : registry()) EXPECT_FALSE(run_document(dsl::parse(e.source)).fatal) << e.id;
}

TEST(Runner, EmptyQueryDocument) {
    auto r = run_document(dsl::parse("sequence { piece full { atom value 1 prob 1 } }\n"));
    EXPECT_EQ(r.report["probe_count"], 0);
    EXPECT_TRUE(r.report["queries"].empty());
    EXPECT_FALSE(r.fatal);
}

TEST(Runner, LimitGridAndMetric) {
    auto r = run_document(dsl::parse(R"(ideal density
sequence { piece full { atom value 0 prob 1 - 1/n atom value 3 prob 1/n } }
target X { atom value 0 prob 1 }
query limit r 0 eps 1/2 1 delta 1/3
query metric)"));
    const auto& g = r.report["queries"][0]["result"]["exception_sets"];
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0]["membership"], "in");
    EXPECT_EQ(r.report["queries"][1]["result"]["rho_at"][2]["rho"], "1/3");
    EXPECT_EQ(r.report["queries"][1]["result"]["verdict"]["answer"], "Yes");
}

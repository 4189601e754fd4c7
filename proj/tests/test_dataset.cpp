#include <sstream>

#include "causalsheet/dataset.hpp"
#include "causalsheet/errors.hpp"
#include "doctest.h"

using namespace causalsheet;

TEST_SUITE_BEGIN("dataset");

TEST_CASE("csv round-trip with quoting") {
    Dataset ds;
    ds.variable_names = {"plain", "with,comma"};
    ds.level_labels = {{"a", "b"}, {"x\"y", "z"}};
    ds.columns = {{0, 1, 1}, {1, 0, 1}};
    ds.validate();

    std::ostringstream os;
    ds.write_csv(os);
    std::istringstream is(os.str());
    Dataset back = Dataset::read_csv(is);
    CHECK(back.variable_names == ds.variable_names);
    CHECK(back.num_rows() == 3);
    // Codes may be renumbered by first appearance; compare label sequences.
    for (int v = 0; v < ds.num_vars(); ++v)
        for (int r = 0; r < ds.num_rows(); ++r)
            CHECK(back.level_labels[v][back.columns[v][r]] == ds.level_labels[v][ds.columns[v][r]]);
}

TEST_CASE("read_csv rejects ragged rows and empty input") {
    std::istringstream ragged("a,b\n1,2\n1\n");
    CHECK_THROWS_AS(Dataset::read_csv(ragged), MalformedCsv);
    std::istringstream empty("");
    CHECK_THROWS_AS(Dataset::read_csv(empty), MalformedCsv);
}

TEST_CASE("read_csv rejects unterminated quotes") {
    std::istringstream is("a\n\"oops\n");
    CHECK_THROWS_AS(Dataset::read_csv(is), MalformedCsv);
}

TEST_CASE("validate catches out-of-range codes") {
    Dataset ds;
    ds.variable_names = {"a"};
    ds.level_labels = {{"x"}};
    ds.columns = {{1}};
    CHECK_THROWS(ds.validate());
}

TEST_SUITE_END();

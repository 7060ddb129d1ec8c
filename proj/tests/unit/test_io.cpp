#include <gtest/gtest.h>

#include <filesystem>

#include "ctmdp/error.hpp"
#include "ctmdp/io.hpp"
#include "fixtures.hpp"

using namespace ctmdp;

TEST(ModelJson, RoundTrip) {
    const auto m = fixtures::benchmark();
    const auto doc = model_to_json(m);
    const auto back = model_from_json(doc);
    EXPECT_EQ(back.rewards(), m.rewards());
    EXPECT_EQ(back.rates(), m.rates());
    EXPECT_EQ(back.transitions(), m.transitions());
    EXPECT_EQ(back.supports(), m.supports());
    EXPECT_EQ(model_to_json(back).dump(), doc.dump());
}

TEST(ModelJson, BenchmarkFileMatchesFixture) {
    const auto m = load_model(fixtures::data_dir() / "benchmark_2x2.json");
    EXPECT_EQ(m.transitions(), fixtures::benchmark().transitions());
    EXPECT_EQ(m.rewards(), fixtures::benchmark().rewards());
}

TEST(ModelJson, FormatErrors) {
    auto doc = model_to_json(fixtures::benchmark());
    auto missing = doc;
    missing.erase("rate");
    EXPECT_THROW(model_from_json(missing), ModelFormatError);
    auto ragged = doc;
    ragged["reward"][1] = {1.0};
    EXPECT_THROW(model_from_json(ragged), ModelFormatError);
    auto text = doc;
    text["lambda_min"] = "half";
    EXPECT_THROW(model_from_json(text), ModelFormatError);
    auto zero = doc;
    zero["num_states"] = 0;
    EXPECT_THROW(model_from_json(zero), ModelFormatError);
    EXPECT_THROW(load_model("/nonexistent/model.json"), InputError);
}

TEST(Format, RealsRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) EXPECT_EQ(std::stod(format_real(x)), x);
}

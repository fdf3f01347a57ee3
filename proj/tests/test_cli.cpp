#include "cli_runner.hpp"
#include "lagdex/lagdex.hpp"
#include "synthetic_data.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

using namespace lagdex;
using lagdex::testing::run_cli;

namespace {

const std::string cli = LAGDEX_CLI_PATH;

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        dir_ = new lagdex::testing::TempDir("cli");
        synthetic::PanelOptions opt;
        opt.seed = 5;
        opt.noise = 1.0;
        opt.index_span = {MonthStamp(1982, 1), MonthStamp(2012, 3)};
        opt.shaped_core_headline = true;
        config_ = new std::string(
            synthetic::write_dataset(synthetic::make_registry(opt), dir_->path() / "data",
                                     {MonthStamp(2002, 4), MonthStamp(2012, 3)})
                .string());
    }
    static void TearDownTestSuite()
    {
        delete config_;
        delete dir_;
    }

    static lagdex::testing::CliResult run(const std::string& out, std::vector<std::string> args)
    {
        std::vector<std::string> full{"--config", *config_, "--out-dir", (dir_->path() / out).string()};
        full.insert(full.end(), args.begin(), args.end());
        return run_cli(cli, full, dir_->path() / "scratch");
    }
    static std::filesystem::path out(const std::string& name) { return dir_->path() / name; }

    static inline lagdex::testing::TempDir* dir_ = nullptr;
    static inline std::string* config_ = nullptr;
};

} // namespace

TEST_F(Cli, SearchWritesFullRanking)
{
    const auto r = run("search", {"--workers", "2", "search"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("COAL(t-1)"), std::string::npos) << r.out;
    const auto doc = json::parse(read_file(out("search") / "search.json"));
    EXPECT_EQ(doc["grid_size"], 17836);
    const auto csv = read_file(out("search") / "ranking.csv");
    const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
    EXPECT_EQ(rows, 17836u - doc["skipped_count"].get<std::size_t>());
    EXPECT_EQ(rows, doc["evaluated_count"].get<std::size_t>());

    const auto manifest = json::parse(read_file(out("search") / "search.manifest.json"));
    EXPECT_EQ(manifest["command"], "search");
    EXPECT_EQ(manifest["window"], "2002-04:2012-03");
    EXPECT_EQ(manifest["inputs"].size(), 16u);
    EXPECT_EQ(manifest["outputs"].size(), 3u);
    for (const auto& o : manifest["outputs"]) EXPECT_EQ(o["sha256"].get<std::string>().size(), 64u);
}

TEST_F(Cli, FitPairPrintsEquationAndTableRow)
{
    const auto r = run("fit", {"fit", "--pair", "PPI,COAL", "--lags", "1,1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("COP(t) = ", 0), 0u);
    EXPECT_NE(r.out.find("PPI(t-1)"), std::string::npos);
    EXPECT_NE(r.out.find("(J-4)"), std::string::npos);
    EXPECT_NE(r.out.find("CPI1"), std::string::npos);
    EXPECT_NE(r.out.find("2012-03"), std::string::npos);
    const auto model = std::get<LagModel>(model_from_json(json::parse(read_file(out("fit") / "model.json"))));
    EXPECT_NEAR(model.terms[1].coefficient, -0.615, 0.1);
    EXPECT_TRUE(std::filesystem::exists(out("fit") / "fit.csv"));
}

TEST_F(Cli, FitIndexDifferenceWithLead)
{
    const auto r = run("fit-dcpi", {"fit", "--dcpi", "CC,C", "--lag", "-1", "--window", "2002-04:2012-02"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("CC-C(t+1)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("(J-2)"), std::string::npos);
}

TEST_F(Cli, ExitCodes)
{
    EXPECT_EQ(run("x", {"fit", "--pair", "PPI,COAL", "--lags", "1,1", "--window", "1990-01:1991-12"}).code, 3);
    const auto unknown = run("x", {"trend", "--a", "NOPE", "--b", "C"});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_NE(unknown.err.find("NOPE"), std::string::npos);
    EXPECT_EQ(run("x", {"fit", "--pair", "PPI,PPI", "--lags", "1,1"}).code, 4);
    EXPECT_EQ(run("x", {"fit", "--pair", "PPI", "--lags", "1,1"}).code, 2);
    EXPECT_EQ(run("x", {"bogus"}).code, 2);
    EXPECT_EQ(run_cli(cli, {"search"}, out("scratch")).code, 2);
    EXPECT_EQ(run_cli(cli, {"--config", (out("none") / "config.json").string(), "search"}, out("scratch")).code, 3);
}

TEST_F(Cli, TrendFindsTwoTurningRegions)
{
    const auto r = run("trend", {"trend", "--a", "CC", "--b", "C", "--max-breaks", "2", "--mirror-pivot", "2012-03",
                                 "--horizon", "36"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(read_file(out("trend") / "trend.json"));
    ASSERT_EQ(doc["breakpoints"].size(), 2u);
    const auto b1 = MonthStamp::parse(doc["breakpoints"][0].get<std::string>());
    const auto b2 = MonthStamp::parse(doc["breakpoints"][1].get<std::string>());
    EXPECT_GE(b1, MonthStamp(1997, 1));
    EXPECT_LE(b1, MonthStamp(2003, 12));
    EXPECT_GE(b2, MonthStamp(2007, 1));
    EXPECT_LE(b2, MonthStamp(2010, 12));
    EXPECT_TRUE(doc.contains("forecast"));
    const auto csv = read_file(out("trend") / "trend.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "month,value,fitted,segment_id");
    EXPECT_NE(csv.find("2015-03,,"), std::string::npos);

    const auto flat = run("trend0", {"trend", "--a", "CC", "--b", "C", "--max-breaks", "0"});
    ASSERT_EQ(flat.code, 0) << flat.err;
    EXPECT_EQ(json::parse(read_file(out("trend0") / "trend.json"))["segments"].size(), 1u);
}

TEST_F(Cli, LedgerHasEightRows)
{
    const auto r = run("ledger", {"--workers", "2", "ledger", "--end-months", "2011-08:2012-03", "--depth", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = read_file(out("ledger") / "ledger.txt");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
    EXPECT_NE(text.find("Month"), std::string::npos);
    const auto doc = json::parse(read_file(out("ledger") / "ledger.json"));
    ASSERT_EQ(doc["rows"].size(), 8u);
    EXPECT_EQ(doc["rows"][0]["end_month"], "2012-03");
    EXPECT_EQ(doc["rows"][7]["end_month"], "2011-08");
    EXPECT_TRUE(doc["stable"].get<bool>());
}

TEST_F(Cli, SignalFromSavedModel)
{
    ASSERT_EQ(run("sig-fit", {"fit", "--pair", "COAL,PPI", "--lags", "1,1"}).code, 0);
    const auto r = run("signal", {"signal", "--model", (out("sig-fit") / "model.json").string(), "--enter", "2",
                                  "--exit", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = read_file(out("signal") / "episodes.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "start,end,sign,peak_deviation,resolved");
    EXPECT_TRUE(std::filesystem::exists(out("signal") / "deviation.csv"));
    EXPECT_TRUE(std::filesystem::exists(out("signal") / "signal.manifest.json"));
}

TEST_F(Cli, RerunsAreByteIdentical)
{
    const std::vector<std::vector<std::string>> commands{
        {"search", "--lag-max", "6"},
        {"ledger", "--end-months", "2011-10:2012-03", "--depth", "3"},
        {"trend", "--a", "CC", "--b", "C"},
        {"fit", "--pair", "E,OIL", "--lags", "2,0"}};
    for (const auto& cmd : commands) {
        std::vector<std::string> a{"--workers", "1"}, b{"--workers", "4"};
        a.insert(a.end(), cmd.begin(), cmd.end());
        b.insert(b.end(), cmd.begin(), cmd.end());
        ASSERT_EQ(run("rerun-a-" + cmd[0], a).code, 0);
        ASSERT_EQ(run("rerun-b-" + cmd[0], b).code, 0);
        const auto x = lagdex::testing::directory_contents(out("rerun-a-" + cmd[0]));
        const auto y = lagdex::testing::directory_contents(out("rerun-b-" + cmd[0]));
        EXPECT_FALSE(x.empty());
        EXPECT_EQ(x, y) << cmd[0];
    }
}

TEST_F(Cli, FetchStoresCsv)
{
    httplib::Server server;
    server.Post("/api", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"REQUEST_SUCCEEDED","Results":{"series":[{"seriesID":"CUUR0000SA0","data":[
            {"year":"2011","period":"M13","value":"224.9"},
            {"year":"2011","period":"M02","value":"221.309"},
            {"year":"2011","period":"M01","value":"220.223"}]}]}})",
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const auto r = run_cli(cli,
                           {"--out-dir", out("fetch").string(), "fetch", "--series-id", "CUUR0000SA0", "--range",
                            "2011-01:2011-12", "--endpoint", "http://127.0.0.1:" + std::to_string(port) + "/api",
                            "--output", "cpi.csv"},
                           out("scratch"));
    server.stop();
    t.join();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_file(out("fetch") / "cpi.csv"),
              "series_id,month,value\nCUUR0000SA0,2011-01,220.223\nCUUR0000SA0,2011-02,221.309\n");

    const auto down = run_cli(cli,
                              {"--out-dir", out("fetch").string(), "fetch", "--series-id", "X", "--range",
                               "2011-01:2011-12", "--endpoint", "http://127.0.0.1:" + std::to_string(port) + "/api",
                               "--output", "x.csv"},
                              out("scratch"));
    EXPECT_EQ(down.code, 3);
}

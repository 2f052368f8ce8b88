#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "xnbf/cli.hpp"
#include "xnbf/error.hpp"
#include "xnbf/image_io.hpp"
#include "xnbf/noise.hpp"

using namespace xnbf;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

double report_value(const std::string& report, const std::string& key) {
    const auto pos = report.find("\n" + key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(report.substr(pos + key.size() + 2));
}

} // namespace

TEST_CASE("parse helpers") {
    CHECK(cli::parse_roi("1,2,30,40") == Roi{1, 2, 30, 40});
    CHECK_THROWS_AS(cli::parse_roi("1,2,3"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_roi("1,2,3,x"), InvalidArgument);
    CHECK(cli::parse_range("3:2:17") == std::vector<double>{3, 5, 7, 9, 11, 13, 15, 17});
    CHECK(cli::parse_range("0.005:0.005:0.05").size() == 10);
    CHECK(cli::parse_range("0.005:0.005:0.05").back() == 0.05);
    CHECK(cli::parse_range("1:1:1") == std::vector<double>{1});
    CHECK_THROWS_AS(cli::parse_range("3:2:1"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_range("1:0:3"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_range("1:3"), InvalidArgument);
    CHECK(cli::split_list(" a, b ,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK_THROWS_AS(cli::split_list("a,,b"), InvalidArgument);
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(3.0) == "3");
    CHECK(std::stod(cli::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("pipeline on the one percent phantom") {
    const Result r = run({"pipeline", "--phantom", "--noise", "1", "--lattice", "11", "--seed", "7"});
    REQUIRE(r.code == 0);
    const double eta = report_value(r.out, "eta");
    CHECK(eta > report_value(r.out, "sigma2"));
    CHECK(eta < report_value(r.out, "c_roi"));
    CHECK(report_value(r.out, "n_d") == 80);
    // defaults are named too
    for (const char* key : {"block_side=8", "retain_fraction=0.25", "bracket_lower=variance", "policy=midpoint",
                            "prefilter=passthrough", "mask_border=0", "lattice=11", "time_filter_ms="}) {
        CHECK(r.out.find(key) != std::string::npos);
    }
}

TEST_CASE("missing input fails with I/O status and writes nothing") {
    testing::TempDir dir;
    const Result r = run({"filter", "--in", (dir / "none.pgm").string(), "--eta", "0.01", "--out",
                          (dir / "o.pgm").string(), "--emit-bwi", (dir / "b.pgm").string()});
    CHECK(r.code == cli::exit_io_failure);
    CHECK(fs::is_empty(dir.path));
}

TEST_CASE("huge threshold leaves the image unchanged") {
    testing::TempDir dir;
    const auto in = dir / "in.raw";
    Image img = testing::random_image(40, 30, 2);
    for (double& v : img.pixels()) v = static_cast<float>(v);
    save_image(img, in, ImageFormat::rawf32);
    const auto out = dir / "out.raw";
    const auto bwi = dir / "bwi.pgm";
    const Result r = run({"filter", "--in", in.string(), "--eta", "999", "--out", out.string(), "--emit-bwi",
                          bwi.string(), "--lattice", "5"});
    REQUIRE(r.code == 0);
    CHECK(load_image(out) == img);
    CHECK(fs::exists(bwi));
    CHECK(fs::exists(dir / "out.report.txt"));
    CHECK(report_value(r.out, "max_bwi") == 0);
}

TEST_CASE("identical runs produce identical bytes") {
    testing::TempDir dir;
    // same paths both times, contents captured in between (the sweep CSV names its outputs)
    std::vector<std::string> first;
    for (int pass = 0; pass < 2; ++pass) {
        REQUIRE(run({"filter", "--phantom", "--noise", "2", "--seed", "3", "--lattice", "7", "--out",
                     (dir / "a.raw").string()})
                    .code == 0);
        REQUIRE(run({"sweep", "--phantom", "--noise", "1", "--seed", "3", "--kind", "eta", "--values",
                     "0.5sigma2,mid,2croi", "--prefix", (dir / "s").string()})
                    .code == 0);
        REQUIRE(run({"cnr-sweep", "--sigmas", "0.01:0.01:0.03", "--seed", "1", "--out", (dir / "c.csv").string()})
                    .code == 0);
        std::vector<std::string> bytes;
        for (const char* f : {"a.raw", "a.dim", "s.csv", "s_eta=mid.raw", "s_eta=2croi.raw", "c.csv"})
            bytes.push_back(slurp(dir / f));
        if (pass == 0) first = bytes;
        else CHECK(bytes == first);
    }
    CHECK(first[5].rfind("sigma,cnr_input,cnr_filtered,cnr_diffusion\n", 0) == 0);
}

TEST_CASE("lattice sweep writes one output per point") {
    testing::TempDir dir;
    const std::string prefix = (dir / "lat").string();
    const Result r = run({"sweep", "--phantom", "--noise", "1", "--kind", "lattice", "--values", "3:2:17", "--prefix",
                          prefix});
    REQUIRE(r.code == 0);
    for (int w = 3; w <= 17; w += 2) CHECK(fs::exists(dir / ("lat_lattice=" + std::to_string(w) + ".raw")));
    std::ifstream csv(prefix + ".csv");
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 8);
    CHECK(fs::exists(prefix + ".report.txt"));
}

TEST_CASE("eta sweep regimes") {
    testing::TempDir dir;
    const std::string prefix = (dir / "eta").string();
    const Result r = run({"sweep", "--phantom", "--noise", "1", "--seed", "2", "--kind", "eta", "--values",
                          "0.5sigma2,mid,2croi", "--prefix", prefix});
    REQUIRE(r.code == 0);
    std::ifstream csv(prefix + ".csv");
    std::string header, line;
    std::getline(csv, header);
    CHECK(header == "param,value,output,lattice,eta,sigma2,c_roi,mean_bwi,contrast_in,contrast_out");
    std::vector<double> meanBwi;
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
        REQUIRE(f.size() == 10);
        meanBwi.push_back(std::stod(f[7]));
    }
    REQUIRE(meanBwi.size() == 3);
    CHECK(meanBwi[0] > meanBwi[1]);
    CHECK(meanBwi[1] > meanBwi[2]);
}

TEST_CASE("sweep errors") {
    testing::TempDir dir;
    const std::string prefix = (dir / "x").string();
    CHECK(run({"sweep", "--phantom", "--kind", "lattice", "--values", "3:2:1", "--prefix", prefix}).code == 2);
    CHECK(run({"sweep", "--phantom", "--kind", "lattice", "--values", "4", "--prefix", prefix}).code == 2);
    CHECK(run({"sweep", "--phantom", "--kind", "eta", "--values", "3furlong", "--prefix", prefix}).code == 2);
    CHECK(run({"sweep", "--phantom", "--kind", "bogus", "--values", "1", "--prefix", prefix}).code == 2);
    save_image(Image(32, 32, 0.5), dir / "flat.raw", ImageFormat::rawf32);
    CHECK(run({"sweep", "--in", (dir / "flat.raw").string(), "--kind", "noise", "--values", "1", "--prefix", prefix})
              .code == 2);
    CHECK(fs::is_directory(dir.path));
    CHECK_FALSE(fs::exists(prefix + ".csv"));
}

TEST_CASE("noise and kappa sweeps") {
    testing::TempDir dir;
    const std::string prefix = (dir / "n").string();
    CHECK(run({"sweep", "--phantom", "--kind", "noise", "--values", "1,4", "--prefix", prefix, "--lattice", "3"})
              .code == 0);
    CHECK(fs::exists(dir / "n_noise=1.raw"));
    CHECK(fs::exists(dir / "n_noise=4.raw"));
    const std::string kp = (dir / "k").string();
    CHECK(run({"sweep", "--phantom", "--noise", "4", "--kind", "kappa", "--values", "0.25sigma,0.02", "--prefix", kp,
               "--iters", "5"})
              .code == 0);
    CHECK(fs::exists(dir / "k_kappa=0.25sigma.raw"));
    CHECK(fs::exists(dir / "k_kappa=0.02.raw"));
}

TEST_CASE("bracket failure reports a remedy") {
    testing::TempDir dir;
    // pure noise with sigma = 5: sigma^2 exceeds any class-mean difference
    const Image noise = add_gaussian_noise(Image(64, 64, 0.0), 5.0, RngSeed{1});
    save_image(noise, dir / "n.raw", ImageFormat::rawf32);
    const Result r = run({"filter", "--in", (dir / "n.raw").string(), "--out", (dir / "o.raw").string()});
    CHECK(r.code == cli::exit_bracket_failure);
    CHECK(r.err.find("prefilter") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o.raw"));
    // a manual threshold sidesteps the bracket
    CHECK(run({"filter", "--in", (dir / "n.raw").string(), "--out", (dir / "o.raw").string(), "--eta", "1"}).code == 0);
}

TEST_CASE("invalid configuration") {
    CHECK(run({}).code == 2);
    CHECK(run({"nosuch"}).code == 2);
    CHECK(run({"filter", "--phantom", "--lattice", "4", "--out", "/tmp/x.raw"}).code == 2);
    CHECK(run({"filter", "--phantom", "--alpha", "1.5", "--out", "/tmp/x.raw"}).code == 2);
    CHECK(run({"filter", "--phantom", "--eta", "0.1", "--eta-auto", "--out", "/tmp/x.raw"}).code == 2);
    CHECK(run({"filter", "--phantom", "--eta", "0.1"}).code == 2);
    CHECK(run({"pipeline", "--phantom", "--roi", "0,0,300,10"}).code == 2);
    CHECK(run({"pipeline", "--phantom", "--roi", "1,2"}).code == 2);
    CHECK(run({"estimate"}).code == 2);
    CHECK(run({"diffuse", "--phantom", "--lambda", "0.3", "--out", "/tmp/x.raw"}).code == 2);
    CHECK(run({"phantom", "--noise", "-1", "--out", "/tmp/x.raw"}).code == 2);
    CHECK(run({"filter", "--phantom", "--eta", "0.1", "--out", "/tmp/x.tif"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("phantom, estimate, baselines, directions, kspace") {
    testing::TempDir dir;
    const auto ph = dir / "p.pgm";
    REQUIRE(run({"phantom", "--noise", "1", "--seed", "4", "--out", ph.string(), "--bits", "16"}).code == 0);
    CHECK(load_image(ph).width() == 256);

    const Result est = run({"estimate", "--phantom", "--noise", "1", "--seed", "4", "--roi", "65,65,127,127"});
    REQUIRE(est.code == 0);
    CHECK(est.out.rfind("sigma2,gamma,c_roi,eta_mid\n", 0) == 0);
    const double s2 = std::stod(est.out.substr(est.out.find('\n') + 1));
    CHECK(std::abs(s2 / 4.2903e-5 - 1.0) < 0.25);

    CHECK(run({"diffuse", "--in", ph.string(), "--kappa", "0.02", "--iters", "3", "--g", "rat", "--out",
               (dir / "d.png").string()})
              .code == 0);
    CHECK(run({"nlm", "--in", ph.string(), "--t", "2", "--f", "1", "--h", "0.05", "--out", (dir / "n.raw").string()})
              .code == 0);
    const Result pf = run({"prefilter", "--phantom", "--noise", "7", "--out", (dir / "pf.raw").string()});
    CHECK(pf.code == 0);
    CHECK(pf.out.rfind("prefiltered", 0) == 0);

    const Result dirs = run({"directions", "--lattice", "7", "--csv", (dir / "d.csv").string()});
    REQUIRE(dirs.code == 0);
    CHECK(dirs.out.find("n_q=7 n_d=32") != std::string::npos);
    std::ifstream csv(dir / "d.csv");
    int lines = 0;
    for (std::string l; std::getline(csv, l);) ++lines;
    CHECK(lines == 33);

    const Result ks = run({"kspace", "--phantom", "--lattice", "3", "--eta", "0.002", "--out-dir",
                           (dir / "ks").string()});
    REQUIRE(ks.code == 0);
    CHECK(fs::exists(dir / "ks" / "kspace_000_right_l0_m1.pgm"));
    CHECK(fs::exists(dir / "ks" / "kspace_007_IV_l1_m1.pgm"));

    const Result emit = run({"filter", "--phantom", "--lattice", "3", "--out", (dir / "f.png").string(), "--emit-kspace",
                             (dir / "fk").string(), "--mask-border", "--report", (dir / "rep.txt").string()});
    REQUIRE(emit.code == 0);
    CHECK(std::distance(fs::directory_iterator(dir / "fk"), fs::directory_iterator{}) == 8);
    CHECK(slurp(dir / "rep.txt").find("mask_border=1") != std::string::npos);
}

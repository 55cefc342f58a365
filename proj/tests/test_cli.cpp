#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hts/surface_io.hpp"

namespace {

using Json = nlohmann::json;

struct Run {
  int code = -1;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

std::string data(const std::string& rel) { return std::string(HTS_DATA_DIR) + "/" + rel; }

std::string tmp(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "hts_cli_test";
  std::filesystem::create_directories(d);
  return (d / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  std::string err = tmp("stderr.txt");
  std::string cmd = std::string(HTS_CLI_PATH) + " " + args + " 2>" + err;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST(CliValidate, SquareTorus) {
  auto r = run("--json validate --surface " + data("surfaces/torus.hts"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  EXPECT_TRUE(j["verdict"]["passed"].get<bool>());
  EXPECT_EQ(j["euler_characteristic"], 0);
  EXPECT_TRUE(j["round_trip"].get<bool>());
}

TEST(CliValidate, DanglingPairingNamesEdge) {
  auto r = run("--json validate --surface " + data("surfaces/dangling.hts"));
  EXPECT_EQ(r.code, 1);
  auto j = r.json();
  ASSERT_FALSE(j["issues"].empty());
  EXPECT_EQ(j["issues"][0]["invariant"], "edge.coverage");
  EXPECT_EQ(j["issues"][0]["element"], "P0.1");
}

TEST(CliValidate, CylinderHasTwoHorizontalBoundaryEdges) {
  auto j = run("--json validate --surface " + data("surfaces/cylinder.hts")).json();
  EXPECT_EQ(j["boundary"]["horizontal"], 2);
  EXPECT_EQ(j["boundary"]["free"], 0);
}

TEST(CliValidate, ParseAndIoErrorsExitThree) {
  auto r = run("validate --surface " + data("surfaces/syntax_error.hts"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_EQ(run("validate --surface " + data("surfaces/no_such_file.hts")).code, 3);
  EXPECT_EQ(run("el --surface " + data("surfaces/dangling.hts")).code, 3);
}

TEST(CliValidate, RoundTrip) {
  for (auto f : {"torus", "octagon", "slit_cylinder", "star_torus", "tripod"}) {
    std::string src = data(std::string("surfaces/") + f + ".hts"), out = tmp(std::string(f) + ".hts");
    ASSERT_EQ(run("validate --surface " + src + " --out " + out).code, 0) << f;
    auto a = hts::parse_surface_file(src), b = hts::parse_surface_file(out);
    EXPECT_TRUE(hts::surfaces_equal(a, b)) << f;
    EXPECT_EQ(hts::serialize_surface(a), slurp(out)) << f;
  }
}

TEST(CliUsage, BadArgumentsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("nosuchcommand").code, 2);
  EXPECT_EQ(run("grunsky --z 1.5").code, 2);
  EXPECT_EQ(run("geodesic --surface " + data("surfaces/torus.hts") + " --from Q:0,0 --to P0:0.5,0.5").code, 2);
}

TEST(CliOutput, SeventeenDigitsAndTolerance) {
  auto r = run("--json stretch --surface " + data("surfaces/torus.hts") + " --K 2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.33333333333333331"), std::string::npos);
  auto j = r.json();
  EXPECT_EQ(j["verdict"]["tolerance"].get<double>(), 1e-15);
  auto t = run("--json --tol 1e-6 el --surface " + data("surfaces/torus.hts")).json();
  EXPECT_EQ(t["verdict"]["tolerance"].get<double>(), 1e-6);
}

TEST(CliOutput, EveryVerdictCarriesTolerance) {
  for (std::string a : {"extension --hx 1 --hy 2", "grunsky --z 0.3 --samples 200", "residue --grid 64",
                        "flow --t 0.1 --samples 10", "unfold --prongs 3"}) {
    auto r = run("--json " + a);
    ASSERT_EQ(r.code, 0) << a << r.err;
    auto j = r.json();
    EXPECT_TRUE(j["verdict"].contains("tolerance")) << a;
  }
}

TEST(CliOutput, Deterministic) {
  std::string base = " --seed 11 gaussbonnet --surface " + data("surfaces/octagon.hts") + " --subdivisions 20";
  auto a = run("--json --svg " + tmp("d1.svg") + base), b = run("--json --svg " + tmp("d2.svg") + base);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(tmp("d1.svg")), slurp(tmp("d2.svg")));
  std::string g = " geodesic --surface " + data("surfaces/octagon.hts") + " --from P0:0.2,0.3 --to P0:1.5,1.9";
  auto c = run("--json --svg " + tmp("g1.svg") + g), d = run("--json --svg " + tmp("g2.svg") + g);
  EXPECT_EQ(c.out, d.out);
  EXPECT_EQ(slurp(tmp("g1.svg")), slurp(tmp("g2.svg")));
}

TEST(CliGeodesic, ChainAndRedSegment) {
  auto r = run("--json --svg " + tmp("geo.svg") + " geodesic --surface " + data("surfaces/torus.hts") +
               " --from P0:0.1,0.1 --to P0:0.9,0.1");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  EXPECT_NEAR(j["length"].get<double>(), 0.2, 1e-12);
  EXPECT_EQ(j["edge_chain"].size(), 1u);
  auto svg = slurp(tmp("geo.svg"));
  EXPECT_NE(svg.find("<polygon"), std::string::npos);
  EXPECT_NE(svg.find("stroke=\"#d00\""), std::string::npos);
}

TEST(CliFoliation, ElAndModulus) {
  auto e = run("--json el --surface " + data("surfaces/cylinder_h2.hts") + " --orientation horizontal").json();
  EXPECT_EQ(e["extremal_length"].get<double>(), 2.0);
  auto m = run("--json modulus --domain " + data("domains/rect_1x2.poly") + " --grid 64").json();
  EXPECT_NEAR(m["extremal_length"].get<double>(), 0.5, 1e-9);
}

TEST(CliQc, StretchWritesSurface) {
  auto out = tmp("stretched.hts");
  auto r = run("--json stretch --surface " + data("surfaces/torus.hts") + " --K 3 --out " + out);
  ASSERT_EQ(r.code, 0) << r.err;
  auto s = hts::parse_surface_file(out);
  EXPECT_EQ(hts::area(s), 3.0);
  EXPECT_EQ(r.json()["energy_ratio"].get<double>(), 3.0);
}

TEST(CliQc, Dilatation) {
  auto ok = run("--json dilatation --map " + data("maps/shear.json"));
  ASSERT_EQ(ok.code, 0) << ok.err;
  double b = 0.5;
  EXPECT_NEAR(ok.json()["dilatation"].get<double>(), ((2 + b * b) + b * std::sqrt(4 + b * b)) / 2, 1e-14);
  auto bad = run("--json dilatation --map " + data("maps/broken.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(bad.json()["map_issues"].empty());
  EXPECT_EQ(run("dilatation --map " + data("maps/shear.json") + " --K 1.5").code, 1);
}

TEST(CliSurgery, SlitUnfoldEnlarge) {
  auto s = run("--json slit --surface " + data("surfaces/cylinder.hts") + " --start P0:0.2,0.5 --length 0.5").json();
  EXPECT_EQ(s["euler_characteristic"], -1);
  EXPECT_EQ(s["tips"][0]["unfold"]["unfolded_prongs"], 4);
  for (int n : {2, 3, 4}) {
    auto u = run("--json unfold --prongs " + std::to_string(n)).json();
    EXPECT_EQ(u["unfold"]["original_prongs"], n);
    EXPECT_EQ(u["unfold"]["unfolded_prongs"], 2 * n);
  }
  auto e = run("--json enlarge --r 0.5").json();
  EXPECT_EQ(e["modulus_after"].get<double>(), 2.0);
}

TEST(CliSurgery, ExtensionCoverFlow) {
  auto x = run("--json extension --hx 1 --hy 3").json();
  EXPECT_NEAR(x["searched"].get<double>(), 1.0, 1e-9);
  auto c = run("--json cover --surface " + data("surfaces/star_torus.hts") + " --branch 0,1 --arc T0.1");
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.json()["chi_cover"], -2);
  EXPECT_EQ(c.json()["energy_ratio"].get<double>(), 2.0);
  auto f = run("--json --svg " + tmp("flow.svg") + " flow --t 0.2");
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(f.json()["dilatation"].get<double>(), 1.0);
  EXPECT_NE(slurp(tmp("flow.svg")).find("#d00"), std::string::npos);
  auto col = run("flow --t 0.4");
  EXPECT_EQ(col.code, 2);
  EXPECT_NE(col.err.find("collision"), std::string::npos);
}

TEST(CliBlob, GrunskyResidueCylinder) {
  auto g = run("--json grunsky --z 0.5 --samples 2000").json();
  EXPECT_NEAR(g["radius"].get<double>(), std::log(3.0), 1e-15);
  EXPECT_EQ(g["violations"], 0);
  auto r = run("--json residue --c 1 --v 1 --grid 512").json();
  EXPECT_NEAR(r["quadrature"]["numeric"].get<double>(), -3.141592653589793, 0.0314);
  EXPECT_TRUE(r["sector_scan"]["matches"].get<bool>());
  auto b = run("--json --svg " + tmp("blob.svg") + " blob-cylinder --hx 1 --hy 2 --height 0.5");
  ASSERT_EQ(b.code, 0) << b.err;
  auto bj = b.json();
  EXPECT_EQ(bj["inner"]["heights"][0].get<double>(), 0.5);
  EXPECT_EQ(bj["inner"]["heights"][1].get<double>(), 1.5);
  EXPECT_EQ(bj["outer"]["region"].size(), 4u);
  EXPECT_NE(slurp(tmp("blob.svg")).find("url(#hatch)"), std::string::npos);
}

TEST(CliSemismooth, ConvexAndDented) {
  auto ok = run("--json semismooth --set " + data("shapes/hexagon.poly"));
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.json()["charts"].size(), 6u);
  auto l = run("--json semismooth --set " + data("shapes/l_shape.poly"));
  EXPECT_EQ(l.code, 1);
  EXPECT_EQ(l.json()["witnesses"][0]["point"][0].get<double>(), 1.0);
  EXPECT_EQ(l.json()["witnesses"][0]["point"][1].get<double>(), 1.0);
  auto h = run("--json semismooth --set " + data("shapes/hair.poly"));
  EXPECT_EQ(h.code, 1);
  bool cusp = false;
  auto hj = h.json();
  for (auto& w : hj["witnesses"])
    if (w["reason"].get<std::string>().find("cusp") != std::string::npos) cusp = true;
  EXPECT_TRUE(cusp);
}

TEST(CliSemismooth, FingersAndReparam) {
  std::string band, wob;
  for (int k : {10, 20, 50, 100}) {
    band += " " + data("curves/band_" + std::to_string(k) + ".poly");
    wob += " " + data("curves/wobbly_" + std::to_string(k) + ".poly");
  }
  auto f = run("--json fingers --curves" + band).json();
  EXPECT_TRUE(f["detected"].get<bool>());
  EXPECT_FALSE(run("--json fingers --curves" + wob).json()["detected"].get<bool>());
  auto r = run("--json reparam --curves" + wob + " --limit " + data("curves/unit_circle.poly") + " --arcs 40,80,200,400");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.json()["sup_errors"][3].get<double>(), 1e-3);
  auto c = run("--json reparam --family c-band");
  EXPECT_EQ(c.code, 1);
  EXPECT_NE(c.json()["obstruction"].get<std::string>().find("finger"), std::string::npos);
  EXPECT_EQ(run("fingers").code, 2);
}

#!/usr/bin/env python3
"""Regenerates the ISO-NE- and PJM-shaped fixtures.

All time series and several system parameters (corridor capacities,
susceptances, generator fleets) are synthetic stand-ins so the fixtures can
ship in the repository; public figures (offshore project sizes and online
years, RPS targets, technology cost projections, cable cost curves) are kept
as-is. Deterministic: rerunning reproduces byte-identical files.
"""

import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))

CABLE_TYPES = [
    {"id": "hvac-400", "capacity_mw": 400,
     "cost": {"model": "quadratic_in_length", "c0": 40.13, "c1": 1.5093, "c2": 0.0229}},
    {"id": "hvdc-1400", "capacity_mw": 1400,
     "cost": {"model": "affine_in_length", "c0": 448.58, "c1": 2.6763}},
    {"id": "hvdc-2200", "capacity_mw": 2200,
     "cost": {"model": "affine_in_length", "c0": 687.44, "c1": 3.5421}},
]

TECHS = [
    {"id": "ng-cc-ccs",
     "capex_per_mw": [2209365.98, 2059151.02, 1917707.74, 1759817.57],
     "fixed_om_per_mw_yr": [62000.0, 61000.0, 60000.0, 60000.0],
     "var_om_per_mwh": [27.29, 29.46, 28.59, 28.54],
     "lifetime_years": 30},
    {"id": "ng-ct",
     "capex_per_mw": [853045.52, 791643.79, 766425.22, 746688.95],
     "fixed_om_per_mw_yr": [21000.0, 21000.0, 21000.0, 21000.0],
     "var_om_per_mwh": [34.48, 39.29, 40.13, 40.50],
     "lifetime_years": 30},
    {"id": "wind",
     "capex_per_mw": [1308400.0, 1052400.0, 921500.0, 874000.0],
     "fixed_om_per_mw_yr": [40165.0, 38365.75, 36905.13, 35444.5],
     "var_om_per_mwh": [0.0, 0.0, 0.0, 0.0],
     "lifetime_years": 25},
    {"id": "solar",
     "capex_per_mw": [1073834.12, 843632.15, 731460.46, 697975.63],
     "fixed_om_per_mw_yr": [16983.15, 15020.43, 14521.95, 14029.36],
     "var_om_per_mwh": [0.0, 0.0, 0.0, 0.0],
     "lifetime_years": 25},
]

STORAGE = {
    "power_capex_per_mw": [236365.10, 252067.20, 254746.03, 238220.32],
    "energy_capex_per_mwh": [254835.78, 178968.64, 151709.97, 141861.83],
    "fixed_om_per_mw_yr": [25375.77, 21819.24, 20421.28, 19023.33],
    "eta_charge": 0.86, "eta_discharge": 0.86,
    "dod": 0.2, "degradation": 0.06, "duration_hours": 4.0,
    "soc_init": 0.5, "lifetime_years": 15,
}

CONFIG = {
    "epochs": 4, "years_per_epoch": 5, "discount_rate": 0.05, "tau": 365,
    "pen_under": 5000.0, "pen_over": 0.0, "flex_fraction": 0.1,
    "curtail_fraction": 0.5,
    "reserve": {"load_fraction": 0.03, "intermittent_fraction": 0.05, "per_zone": False},
    "delta_h": 1.0, "delta_h_reserve": 1.0 / 6.0, "build_delay": 0,
    "externality_weight": 1.0, "scc": 51.0, "mip_gap": 1e-4,
    "load_growth": 0.023, "line_lifetime_years": 40, "currency_year": "2020",
}

BLOCKS = [
    {"id": "b1", "willingness_to_pay": 383.0, "share": 0.25},
    {"id": "b2", "willingness_to_pay": 575.0, "share": 0.25},
    {"id": "b3", "willingness_to_pay": 1149.0, "share": 0.25},
    {"id": "b4", "willingness_to_pay": 5000.0, "share": 0.25},
]

AIR = {"coal": 60.38, "gas-cc": 15.42, "gas-ct": 26.22, "gas-steam": 29.41, "oil": 133.70}
CO2 = {"coal": 0.98, "gas-cc": 0.37, "gas-ct": 0.55, "gas-steam": 0.60, "oil": 0.80,
       "nuclear": 0.0}


def gen(gid, zone, tech, pmax, vc, kind, fom=9000.0, profile=None):
    g = {"id": gid, "zone": zone, "tech": tech, "dispatchable": profile is None,
         "status": "existing", "p_min_mw": 0.0, "p_max_mw": float(pmax),
         "ramp_mw_per_hour": float(pmax), "var_cost_per_mwh": float(vc),
         "fixed_cost_per_mw_yr": float(fom)}
    if profile:
        g["profile"] = profile
    if kind:
        g["externality_rates"] = {"co2": CO2[kind], "air_quality": AIR.get(kind, 0.0)}
    return g


def new_gen(gid, zone, tech, rates=None, profile=None):
    g = {"id": gid, "zone": zone, "tech": tech, "dispatchable": profile is None,
         "status": "new", "p_min_mw": 0.0, "p_max_mw": 0.0,
         "ramp_mw_per_hour": 1e6, "var_cost_per_mwh": 0.0, "fixed_cost_per_mw_yr": 0.0}
    if profile:
        g["profile"] = profile
    if rates:
        g["externality_rates"] = rates
    return g


def isone(split_rev):
    onshore = ["ME", "NH", "VT", "CT", "RI", "SEMA", "WCMA", "NEMA"]
    region_of = {"ME": "ME", "NH": "NH", "VT": "VT", "CT": "CT", "RI": "RI",
                 "SEMA": "MA", "WCMA": "MA", "NEMA": "MA"}
    farms = ([("REV_CT", 304, 1), ("REV_RI", 400, 1)] if split_rev else
             [("REV", 704, 1)]) + [
        ("VINE", 800, 1), ("PKCTY", 800, 1), ("COMW", 1232, 1),
        ("MFLR1", 804, 1), ("MFLR2", 400, 1)]

    zones = [{"id": z, "kind": "onshore", "region": region_of[z]} for z in onshore]
    zones += [{"id": f, "kind": "offshore", "online_epoch": e} for f, _, e in farms]

    corridors = [
        ("ME", "NH", 1600, 95, 3200), ("NH", "VT", 800, 70, 2400),
        ("NH", "NEMA", 1400, 60, 3600), ("VT", "WCMA", 900, 75, 2600),
        ("WCMA", "NEMA", 2200, 55, 4200), ("WCMA", "CT", 2000, 45, 4000),
        ("CT", "RI", 1100, 40, 3000), ("CT", "SEMA", 1300, 65, 3400),
        ("RI", "SEMA", 1200, 30, 3200), ("SEMA", "NEMA", 1800, 35, 4400),
        ("NEMA", "RI", 1000, 45, 2800),
    ]
    types = list(CABLE_TYPES)
    lines = []
    for a, b, cap, miles, sus in corridors:
        lines.append({"id": f"{a}-{b}", "from": a, "to": b, "current": "ac",
                      "status": "existing", "locale": "onshore",
                      "susceptance": float(sus), "length_miles": float(miles),
                      "capacity_mw": float(cap)})
        tid = f"ug-{a}-{b}"
        types.append({"id": tid, "capacity_mw": float(cap),
                      "cost": {"model": "per_mw_mile", "rate_per_mw_mile": 3888.5}})
        lines.append({"id": f"{a}-{b}-ug", "from": a, "to": b, "current": "ac",
                      "status": "candidate", "locale": "onshore",
                      "susceptance": float(sus), "length_miles": float(miles),
                      "allowed_types": [tid]})

    exports = {
        "REV_CT": [("CT", 60)], "REV_RI": [("RI", 40)],
        "REV": [("CT", 60), ("RI", 40)],
        "VINE": [("SEMA", 35)], "PKCTY": [("SEMA", 40)], "COMW": [("SEMA", 45)],
        "MFLR1": [("SEMA", 38)], "MFLR2": [("SEMA", 42)],
    }
    farm_ids = [f for f, _, _ in farms]
    for f in farm_ids:
        for poi, miles in exports[f]:
            lines.append({"id": f"{f}-{poi}-ac", "from": f, "to": poi, "current": "ac",
                          "status": "candidate", "locale": "offshore",
                          "susceptance": 2000.0, "length_miles": float(miles),
                          "allowed_types": ["hvac-400"]})
            lines.append({"id": f"{f}-{poi}-dc", "from": f, "to": poi, "current": "dc",
                          "status": "candidate", "locale": "offshore",
                          "length_miles": float(miles),
                          "allowed_types": ["hvdc-1400", "hvdc-2200"]})
        # Wider POI menu, active only when interconnection points are optimized.
        base = {p for p, _ in exports[f]}
        for poi, miles in [("ME", 130), ("NH", 110), ("NEMA", 60), ("CT", 65),
                           ("RI", 45), ("SEMA", 38)]:
            if poi in base:
                continue
            lines.append({"id": f"{f}-{poi}-opoi", "from": f, "to": poi, "current": "dc",
                          "status": "candidate", "locale": "offshore",
                          "length_miles": float(miles),
                          "allowed_types": ["hvdc-1400", "hvdc-2200"],
                          "opoi_only": True})
    interfarm = [("VINE", "COMW", 12), ("MFLR1", "MFLR2", 8), ("PKCTY", "MFLR1", 10),
                 ("VINE", "MFLR2", 15)]
    if split_rev:
        interfarm.append(("REV_RI", "MFLR2", 25))
    else:
        interfarm.append(("REV", "MFLR2", 25))
    for a, b, miles in interfarm:
        lines.append({"id": f"{a}-{b}-if", "from": a, "to": b, "current": "dc",
                      "status": "candidate", "locale": "offshore",
                      "length_miles": float(miles), "allowed_types": ["hvdc-1400"]})

    gens = [
        gen("wind_me", "ME", "wind-x", 900, 0, None, 40165.0, "wind"),
        gen("gas_me", "ME", "gas-cc", 800, 32, "gas-cc"),
        gen("coal_nh", "NH", "coal", 340, 22, "coal"),
        gen("gas_nh", "NH", "gas-ct", 600, 33, "gas-ct"),
        gen("gas_vt", "VT", "gas-ct", 300, 36, "gas-ct"),
        gen("nuc_ct", "CT", "nuclear", 2100, 9, "nuclear", 120000.0),
        gen("gas_ct", "CT", "gas-cc", 2000, 31, "gas-cc"),
        gen("gas_ri", "RI", "gas-cc", 1800, 30, "gas-cc"),
        gen("coal_sema", "SEMA", "coal", 750, 21, "coal"),
        gen("gas_sema", "SEMA", "gas-cc", 1500, 29, "gas-cc"),
        gen("gas_wcma", "WCMA", "gas-steam", 1200, 34, "gas-steam"),
        gen("solar_wcma", "WCMA", "solar-x", 400, 0, None, 16983.0, "solar"),
        gen("gas_nema", "NEMA", "gas-cc", 2600, 33, "gas-cc"),
        gen("oil_nema", "NEMA", "oil", 400, 95, "oil"),
    ]
    for f, cap, _ in farms:
        gens.append(gen(f"osw_{f.lower()}", f, "wind-osw", cap, 0, None, 0.0, "wind"))
    for z in ["ME", "VT", "CT", "SEMA", "NEMA"]:
        gens.append(new_gen(f"new_wind_{z.lower()}", z, "wind", profile="wind"))
    for z in ["WCMA", "CT", "SEMA"]:
        gens.append(new_gen(f"new_solar_{z.lower()}", z, "solar", profile="solar"))
    for z in ["NEMA", "SEMA"]:
        gens.append(new_gen(f"new_ngct_{z.lower()}", z, "ng-ct",
                            {"co2": CO2["gas-ct"], "air_quality": AIR["gas-ct"]}))
    gens.append(new_gen("new_ccs_ct", "CT", "ng-cc-ccs",
                        {"co2": 0.04, "air_quality": AIR["gas-cc"]}))

    techs = []
    for t in TECHS:
        t = dict(t)
        t["buildable_zones"] = {
            "wind": ["ME", "VT", "CT", "SEMA", "NEMA"],
            "solar": ["WCMA", "CT", "SEMA"],
            "ng-ct": ["NEMA", "SEMA"],
            "ng-cc-ccs": ["CT"],
        }[t["id"]]
        techs.append(t)

    regions = [
        {"id": "ME", "rps_target": 0.80, "target_epoch": 2, "enforcement": "strict"},
        {"id": "NH", "rps_target": 0.252, "target_epoch": 1, "enforcement": "strict"},
        {"id": "VT", "rps_target": 0.75, "target_epoch": 2, "enforcement": "strict"},
        {"id": "MA", "rps_target": 0.80, "target_epoch": 2, "enforcement": "strict"},
        {"id": "CT", "rps_target": 0.48, "target_epoch": 2, "enforcement": "strict"},
        {"id": "RI", "rps_target": 0.385, "target_epoch": 3, "enforcement": "strict"},
    ]

    tag = "fixed" if split_rev else "opoi"
    all_zone_ids = [z["id"] for z in zones]
    return {
        "name": f"isone-8zone-{tag}",
        "config": CONFIG,
        "zones": zones,
        "line_types": types,
        "lines": lines,
        "technologies": techs,
        "generators": gens,
        "storage": STORAGE,
        "demand_blocks": BLOCKS,
        "policy_regions": regions,
        "time_series": {
            "demand": f"load_{tag}.csv",
            "profiles": {"wind": f"wind_cf_{tag}.csv", "solar": f"solar_cf_{tag}.csv"},
        },
    }, all_zone_ids, tag


PEAKS = {"ME": 1400, "NH": 1300, "VT": 700, "CT": 3600, "RI": 1000, "SEMA": 1900,
         "WCMA": 2100, "NEMA": 3300,
         "AP": 5200, "ATSI": 9800, "COMD": 16000, "DOM": 17000, "EMAC": 8800,
         "PENE": 2600, "SMAC": 5400, "WEST": 32000, "WMAC": 6600}


def series(zone_ids, offshore, out_prefix, tag, seed):
    rng = random.Random(seed)
    hours = 365 * 24
    load_rows, wind_rows, solar_rows = [], [], []
    phase = {z: rng.uniform(0, 2 * math.pi) for z in zone_ids}
    cloud = {z: 0.0 for z in zone_ids}
    breeze = {z: rng.uniform(0.3, 0.6) for z in zone_ids}
    for t in range(hours):
        day = t // 24
        hod = t % 24
        season = math.cos(2 * math.pi * (day - 15) / 365)  # winter high
        lr, wr, sr = [], [], []
        for z in zone_ids:
            off = z in offshore
            if off:
                lr.append(0.0)
            else:
                base = PEAKS[z]
                diurnal = 0.72 + 0.18 * math.sin(2 * math.pi * (hod - 8) / 24) \
                    + 0.06 * math.sin(4 * math.pi * (hod - 6) / 24)
                weekly = 0.96 if (day % 7) >= 5 else 1.0
                lvl = base * diurnal * weekly * (1 + 0.10 * season)
                lvl *= 1 + rng.gauss(0, 0.02)
                lr.append(max(lvl, 0.05 * base))
            breeze[z] = 0.92 * breeze[z] + 0.08 * rng.uniform(0, 1)
            mean = 0.52 if off else 0.33
            w = mean * (1 + 0.25 * season) + 0.45 * (breeze[z] - 0.5) \
                + 0.05 * math.sin(2 * math.pi * (hod + phase[z]) / 24)
            wr.append(min(max(w, 0.0), 0.97))
            if off:
                sr.append(0.0)
            else:
                cloud[z] = 0.9 * cloud[z] + 0.1 * rng.uniform(0.4, 1.0)
                bell = max(math.cos(2 * math.pi * (hod - 13) / 24), 0.0) ** 1.5
                amp = 0.78 * (1 - 0.35 * season)
                sr.append(min(max(bell * amp * cloud[z], 0.0), 1.0))
        load_rows.append(lr)
        wind_rows.append(wr)
        solar_rows.append(sr)

    def dump(rows, name, fmt):
        with open(os.path.join(HERE, name), "w") as f:
            f.write(",".join(zone_ids) + "\n")
            for r in rows:
                f.write(",".join(fmt % v for v in r) + "\n")

    dump(load_rows, f"{out_prefix}/load_{tag}.csv", "%.1f")
    dump(wind_rows, f"{out_prefix}/wind_cf_{tag}.csv", "%.3f")
    dump(solar_rows, f"{out_prefix}/solar_cf_{tag}.csv", "%.3f")


def pjm():
    onshore = ["AP", "ATSI", "COMD", "DOM", "EMAC", "PENE", "SMAC", "WEST", "WMAC"]
    region_of = {"AP": "MD", "SMAC": "MD", "ATSI": "OH", "WEST": "OH", "COMD": "IL",
                 "DOM": "VA", "EMAC": "NJ", "PENE": "PA", "WMAC": "PA"}
    zones = [{"id": z, "kind": "onshore", "region": region_of[z]} for z in onshore]
    zones += [{"id": "OSW_A", "kind": "offshore", "online_epoch": 1},
              {"id": "OSW_B", "kind": "offshore", "online_epoch": 2}]

    corridors = [
        ("WEST", "ATSI", 6500, 120, 9000), ("WEST", "COMD", 7000, 160, 9500),
        ("WEST", "AP", 5200, 140, 8000), ("ATSI", "PENE", 2600, 110, 5200),
        ("PENE", "WMAC", 2400, 90, 5000), ("WMAC", "EMAC", 4200, 70, 7000),
        ("AP", "WMAC", 3000, 100, 6000), ("AP", "SMAC", 3400, 80, 6400),
        ("SMAC", "DOM", 3600, 90, 6600), ("DOM", "EMAC", 2800, 150, 5400),
        ("COMD", "ATSI", 3800, 170, 6800),
    ]
    types = list(CABLE_TYPES)
    lines = []
    for a, b, cap, miles, sus in corridors:
        lines.append({"id": f"{a}-{b}", "from": a, "to": b, "current": "ac",
                      "status": "existing", "locale": "onshore",
                      "susceptance": float(sus), "length_miles": float(miles),
                      "capacity_mw": float(cap)})
        tid = f"ug-{a}-{b}"
        types.append({"id": tid, "capacity_mw": float(cap),
                      "cost": {"model": "per_mw_mile", "rate_per_mw_mile": 1499.85}})
        lines.append({"id": f"{a}-{b}-ug", "from": a, "to": b, "current": "ac",
                      "status": "candidate", "locale": "onshore",
                      "susceptance": float(sus), "length_miles": float(miles),
                      "allowed_types": [tid]})
    for f, pois in [("OSW_A", [("EMAC", 35), ("SMAC", 70)]),
                    ("OSW_B", [("EMAC", 55), ("DOM", 60)])]:
        for poi, miles in pois:
            lines.append({"id": f"{f}-{poi}-ac", "from": f, "to": poi, "current": "ac",
                          "status": "candidate", "locale": "offshore",
                          "susceptance": 2000.0, "length_miles": float(miles),
                          "allowed_types": ["hvac-400"]})
            lines.append({"id": f"{f}-{poi}-dc", "from": f, "to": poi, "current": "dc",
                          "status": "candidate", "locale": "offshore",
                          "length_miles": float(miles),
                          "allowed_types": ["hvdc-1400", "hvdc-2200"]})
    lines.append({"id": "OSW_A-OSW_B-if", "from": "OSW_A", "to": "OSW_B", "current": "dc",
                  "status": "candidate", "locale": "offshore", "length_miles": 40.0,
                  "allowed_types": ["hvdc-1400"]})

    gens = []
    fleet = {"AP": [("coal", 2400, 20), ("gas-cc", 3200, 28)],
             "ATSI": [("coal", 3000, 21), ("gas-cc", 5200, 27)],
             "COMD": [("nuclear", 9000, 8), ("gas-ct", 4200, 33)],
             "DOM": [("nuclear", 3400, 9), ("gas-cc", 8000, 27), ("coal", 2200, 22)],
             "EMAC": [("nuclear", 3500, 9), ("gas-cc", 4500, 29)],
             "PENE": [("gas-cc", 2200, 28)],
             "SMAC": [("gas-ct", 2600, 34), ("coal", 1400, 23)],
             "WEST": [("nuclear", 6000, 8), ("coal", 9000, 20), ("gas-cc", 12000, 26)],
             "WMAC": [("nuclear", 2300, 9), ("gas-cc", 3600, 28)]}
    for z, units in fleet.items():
        for kind, cap, vc in units:
            gens.append(gen(f"{kind.replace('-', '')}_{z.lower()}", z, kind, cap, vc, kind))
        gens.append(gen(f"wind_{z.lower()}", z, "wind-x", 0.08 * PEAKS[z], 0, None,
                        40165.0, "wind"))
        gens.append(gen(f"solar_{z.lower()}", z, "solar-x", 0.07 * PEAKS[z], 0, None,
                        16983.0, "solar"))
    gens.append(gen("osw_a", "OSW_A", "wind-osw", 1500, 0, None, 0.0, "wind"))
    gens.append(gen("osw_b", "OSW_B", "wind-osw", 1100, 0, None, 0.0, "wind"))
    for z in onshore:
        gens.append(new_gen(f"new_wind_{z.lower()}", z, "wind", profile="wind"))
        gens.append(new_gen(f"new_solar_{z.lower()}", z, "solar", profile="solar"))
    for z in ["EMAC", "DOM", "WEST"]:
        gens.append(new_gen(f"new_ngct_{z.lower()}", z, "ng-ct",
                            {"co2": CO2["gas-ct"], "air_quality": AIR["gas-ct"]}))

    techs = []
    for t in TECHS:
        if t["id"] == "ng-cc-ccs":
            continue
        t = dict(t)
        t["buildable_zones"] = onshore if t["id"] in ("wind", "solar") else \
            ["EMAC", "DOM", "WEST"]
        techs.append(t)

    regions = [
        {"id": "MD", "rps_target": 0.50, "target_epoch": 2, "enforcement": "strict"},
        {"id": "OH", "rps_target": 0.085, "target_epoch": 1, "enforcement": "strict"},
        {"id": "IL", "rps_target": 0.50, "target_epoch": 4, "enforcement": "strict"},
        {"id": "VA", "rps_target": 1.00, "target_epoch": 5, "enforcement": "strict"},
        {"id": "NJ", "rps_target": 0.50, "target_epoch": 2, "enforcement": "strict"},
        {"id": "PA", "rps_target": 0.18, "target_epoch": 1, "enforcement": "strict"},
    ]
    return {
        "name": "pjm-9zone",
        "config": CONFIG,
        "zones": zones,
        "line_types": types,
        "lines": lines,
        "technologies": techs,
        "generators": gens,
        "storage": STORAGE,
        "demand_blocks": BLOCKS,
        "policy_regions": regions,
        "time_series": {
            "demand": "load_pjm.csv",
            "profiles": {"wind": "wind_cf_pjm.csv", "solar": "solar_cf_pjm.csv"},
        },
    }


def main():
    os.makedirs(os.path.join(HERE, "isone"), exist_ok=True)
    os.makedirs(os.path.join(HERE, "pjm"), exist_ok=True)

    for split in (True, False):
        sysj, zone_ids, tag = isone(split)
        with open(os.path.join(HERE, "isone", f"system_{tag}.json"), "w") as f:
            json.dump(sysj, f, indent=1)
            f.write("\n")
        offshore = {z["id"] for z in sysj["zones"] if z["kind"] == "offshore"}
        series(zone_ids, offshore, "isone", tag, seed=7)

    sysj = pjm()
    with open(os.path.join(HERE, "pjm", "system.json"), "w") as f:
        json.dump(sysj, f, indent=1)
        f.write("\n")
    zone_ids = [z["id"] for z in sysj["zones"]]
    series(zone_ids, {"OSW_A", "OSW_B"}, "pjm", "pjm", seed=11)
    print("fixtures written")


if __name__ == "__main__":
    main()

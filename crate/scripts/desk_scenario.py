#!/usr/bin/env python3
"""Regenerates crates/core/scenarios/desk.toml.

Eight providers on a ring of eight regions: provider i owns two servers in region i
and two in region i+1, and its application's users are split the same way.
"""
import random
import sys

REGIONS = [
    (40.0, -100.0),
    (48.0, 10.0),
    (35.0, 135.0),
    (-25.0, 135.0),
    (-15.0, -55.0),
    (0.0, 20.0),
    (22.0, 78.0),
    (58.0, 60.0),
]
PROVIDERS = len(REGIONS)
SERVERS_PER_REGION = 2
USERS_PER_REGION = 10
CAPACITY = 5
PAYMENT = 100.0


def jitter(rng, center, spread=2.0):
    lat, lon = center
    return round(lat + rng.uniform(-spread, spread), 3), round(lon + rng.uniform(-spread, spread), 3)


def main(out):
    rng = random.Random(2024)
    lines = [
        "# Desk scenario: 8 providers, 32 servers, 160 users, 8 federations.",
        "# Regenerate with scripts/desk_scenario.py.",
        "schema_version = 1",
        'name = "desk"',
        "seed = 7",
        "federations = 8",
        "",
        "[economics]",
        "oc_unit = 1.0",
        "tc_unit = 0.5",
        "sigma_floor = 0.0",
        "rt_sla = 0.6",
        "tp_sla = 800.0",
        "",
        "[data]",
        'source = "synthetic"',
        "noise = 0.1",
        "extra_users = 40",
        "test_fraction = 0.2",
        "",
        "[train]",
        "learning_rate = 0.3",
        "local_epochs = 1",
        "batch_size = 32",
        "rounds = 300",
        "clients_per_round = 8",
        'selection = "weighted"',
        "hidden = [64, 32]",
        'activation = "relu"',
        "",
        "[ga]",
        "population_size = 200",
        "mutation_rate = 0.05",
        "max_generations = 600",
        "stall_generations = 150",
        "",
    ]
    sid = 0
    for p in range(PROVIDERS):
        for region in (p, (p + 1) % PROVIDERS):
            for _ in range(SERVERS_PER_REGION):
                lat, lon = jitter(rng, REGIONS[region])
                lines += [
                    "[[servers]]",
                    f"id = {sid}",
                    f"provider = {p}",
                    f"lat = {lat}",
                    f"lon = {lon}",
                    f"capacity = {CAPACITY}",
                    "",
                ]
                sid += 1
    for p in range(PROVIDERS):
        lines += ["[[applications]]", f"id = {p}", f"provider = {p}", f"payment = {PAYMENT}", ""]
    uid = 0
    for p in range(PROVIDERS):
        for region in (p, (p + 1) % PROVIDERS):
            for _ in range(USERS_PER_REGION):
                lat, lon = jitter(rng, REGIONS[region], 3.0)
                lines += ["[[users]]", f"id = {uid}", f"lat = {lat}", f"lon = {lon}", f"apps = [{p}]", ""]
                uid += 1
    with open(out, "w") as f:
        f.write("\n".join(lines).rstrip() + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/scenarios/desk.toml")

"""Deterministic port cargo-pickup scenario with a ground-truth ledger.

Each truck runs Enter Gate -> Weigh Empty -> Load Cargo -> Weigh Loaded ->
Exit Gate. A weighbridge reports empty and loaded weights (anchored to
truck ids and weigh events); per-truck GPS units report speed every 30
simulated seconds. A configurable share of trucks get a loaded weight
deviating more than 10% from the declared cargo weight; a configurable
number of GPS rows are rendered unparseable.

The ground-truth ledger records expected statistics, process edges,
per-truck weights, and expected enrichment values, all computed here from
first principles so downstream code can be tested against it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..errors import ParamError
from ..ocel.model import E2ORelation, O2ORelation, ObjectAttributeEntry, OcelEvent, \
    OcelLog, OcelObject
from ..ocel.storage import write_ocel
from ..timeutil import epoch_ms, format_timestamp

ACTIVITIES = ("Enter Gate", "Weigh Empty", "Load Cargo", "Weigh Loaded", "Exit Gate")
BASE_TIME = datetime(2024, 3, 1, 6, 0, 0, tzinfo=timezone.utc)
TRUCK_STAGGER_S = 1200
GPS_PERIOD_S = 30
MATERIALS = ("grain", "sand", "cement", "gravel")
GATES = ("G1", "G2", "G3")

WEIGHT_HEADERS = ("sensor_id", "sensor_type", "kind", "measurement", "unit",
                  "value", "recorded_at", "object_id", "event_id", "site")
GPS_HEADERS = ("device", "model", "metric", "units", "reading", "timestamp",
               "asset_id", "zone")


@dataclass(frozen=True)
class ScenarioParams:
    seed: int
    truck_count: int = 8
    plan_count: int = 3
    anomaly_rate: float = 0.25
    corruption_count: int = 5

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ParamError("seed must be an integer")
        if self.truck_count < 1:
            raise ParamError("truck_count must be >= 1")
        if self.plan_count < 1:
            raise ParamError("plan_count must be >= 1")
        if not (0.0 <= self.anomaly_rate <= 1.0):
            raise ParamError("anomaly_rate must lie in [0, 1]")
        if self.corruption_count < 0:
            raise ParamError("corruption_count must be >= 0")


@dataclass(frozen=True)
class ScenarioArtifacts:
    store_path: Path
    gps_path: Path
    weight_path: Path
    truth_path: Path
    truth: dict


def _csv_line(cells) -> str:
    out = []
    for cell in cells:
        text = str(cell)
        if any(ch in text for ch in ",\"\n"):
            text = '"' + text.replace('"', '""') + '"'
        out.append(text)
    return ",".join(out)


def _iso(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def generate(params: ScenarioParams, out_dir) -> ScenarioArtifacts:
    """Emit store + sensor tables + ground truth; same seed, same bytes."""
    rng = random.Random(params.seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    t_width = max(2, len(str(params.truck_count)))
    trucks = [f"truck-{i:0{t_width}d}" for i in range(1, params.truck_count + 1)]
    cargos = {t: f"cargo-{i:0{t_width}d}" for i, t in enumerate(trucks, 1)}
    plans = [f"plan-{i:02d}" for i in range(1, params.plan_count + 1)]
    silo_count = max(2, params.plan_count)
    silos = [f"silo-{i}" for i in range(1, silo_count + 1)]
    plan_of = {t: plans[i % len(plans)] for i, t in enumerate(trucks)}

    anomaly_count = round(params.anomaly_rate * params.truck_count)
    anomalous = set(rng.sample(trucks, anomaly_count))

    events: list = []
    e2o: list = []
    truth_weights: dict = {}
    weigh_event_ids: dict = {}
    weight_rows: list = []
    gps_rows: list = []
    gps_per_truck: dict = {t: [] for t in trucks}  # row indices into gps_rows
    silo_of: dict = {}
    event_no = 0
    gate_of: dict = {}

    for truck in trucks:
        idx = trucks.index(truck)
        cargo = cargos[truck]
        plan_id = plan_of[truck]
        silo = rng.choice(silos)
        silo_of[truck] = silo

        start = BASE_TIME + timedelta(seconds=idx * TRUCK_STAGGER_S)
        times = [start]
        for _ in range(4):
            times.append(times[-1] + timedelta(seconds=rng.randint(240, 420)))
        gate_in, gate_out = rng.choice(GATES), rng.choice(GATES)
        gate_of[truck] = (gate_in, gate_out)

        ids = []
        for step, (activity, time) in enumerate(zip(ACTIVITIES, times)):
            event_no += 1
            event_id = f"ev-{event_no:04d}"
            ids.append(event_id)
            attrs = {}
            if activity == "Enter Gate":
                attrs = {"gate": gate_in}
            elif activity == "Exit Gate":
                attrs = {"gate": gate_out}
            events.append(OcelEvent(id=event_id, activity=activity, time=time,
                                    attributes=attrs))
            e2o.append(E2ORelation(event_id, truck, "truck"))
            if activity in ("Enter Gate", "Exit Gate"):
                e2o.append(E2ORelation(event_id, plan_id, "plan"))
            if activity in ("Load Cargo", "Weigh Loaded"):
                e2o.append(E2ORelation(event_id, cargo, "cargo"))
            if activity == "Load Cargo":
                e2o.append(E2ORelation(event_id, silo, "silo"))

        empty_kg = round(rng.uniform(11000.0, 16000.0), 1)
        declared_kg = round(rng.uniform(8000.0, 20000.0), 1)
        sign = rng.choice((-1.0, 1.0))
        if truck in anomalous:
            deviation = sign * rng.uniform(0.12, 0.35)
        else:
            deviation = sign * rng.uniform(0.0, 0.05)
        loaded_kg = round(empty_kg + declared_kg * (1.0 + deviation), 1)
        truth_weights[truck] = {
            "empty_kg": empty_kg,
            "loaded_kg": loaded_kg,
            "declared_kg": declared_kg,
            "anomalous": truck in anomalous,
        }
        weigh_event_ids[truck] = {"empty": ids[1], "loaded": ids[3]}
        for value, event_id, time in ((empty_kg, ids[1], times[1]),
                                      (loaded_kg, ids[3], times[3])):
            weight_rows.append((
                "weighbridge-1", "scale", "sensor", "weight_kg", "kg",
                str(value), _iso(time), truck, event_id, "weighbridge lane 1"))

        device = f"gps-{truck}"
        tick = times[0]
        while tick <= times[4]:
            speed = round(rng.uniform(0.0, 60.0), 1)
            gps_per_truck[truck].append(len(gps_rows))
            gps_rows.append([
                device, "gps", "speed_kmh", "km/h", str(speed), _iso(tick),
                truck, "yard"])
            tick = tick + timedelta(seconds=GPS_PERIOD_S)

    # corrupt a sample of GPS rows, cycling through three failure shapes
    corrupted: list = []
    corruption_count = min(params.corruption_count, len(gps_rows))
    if corruption_count:
        for j, row_idx in enumerate(sorted(rng.sample(range(len(gps_rows)),
                                                      corruption_count))):
            row = gps_rows[row_idx]
            form = j % 3
            if form == 0:
                row[5] = "not-a-timestamp"
                reason = "unparseable-timestamp"
            elif form == 1:
                row[4] = ""
                reason = "missing-required-field"
            else:
                row[4] = "corrupted"
                reason = "unparseable-number"
            corrupted.append({"row": row_idx, "reason": reason})
    corrupted_idx = {c["row"] for c in corrupted}

    # objects with their initial attributes
    objects: list = []
    for truck in trucks:
        plate = f"{rng.choice('ABCDEFGH')}{rng.randint(100, 999)}-{rng.randint(10, 99)}"
        objects.append(OcelObject(
            id=truck, object_type="Truck",
            attribute_history=(ObjectAttributeEntry("plate", plate, BASE_TIME),)))
    for truck in trucks:
        objects.append(OcelObject(
            id=cargos[truck], object_type="Cargo",
            attribute_history=(ObjectAttributeEntry(
                "declared_weight_kg", truth_weights[truck]["declared_kg"], BASE_TIME),)))
    for i, plan_id in enumerate(plans):
        objects.append(OcelObject(
            id=plan_id, object_type="PickupPlan",
            attribute_history=(ObjectAttributeEntry(
                "scheduled_date", "2024-03-01", BASE_TIME),)))
    for silo in silos:
        material = MATERIALS[silos.index(silo) % len(MATERIALS)]
        objects.append(OcelObject(
            id=silo, object_type="Silo",
            attribute_history=(ObjectAttributeEntry("material", material, BASE_TIME),)))

    o2o = []
    for truck in trucks:
        o2o.append(O2ORelation(cargos[truck], silo_of[truck], "sourced-from"))
        o2o.append(O2ORelation(plan_of[truck], truck, "includes"))

    log = OcelLog.build(
        events=events, objects=objects, e2o=e2o, o2o=o2o,
        event_attr_types={
            "Enter Gate": {"gate": "string"},
            "Weigh Empty": {},
            "Load Cargo": {},
            "Weigh Loaded": {},
            "Exit Gate": {"gate": "string"},
        },
        object_attr_types={
            "Truck": {"plate": "string"},
            "Cargo": {"declared_weight_kg": "float"},
            "PickupPlan": {"scheduled_date": "string"},
            "Silo": {"material": "string"},
        })

    truth = _ground_truth(params, log, trucks, cargos, plans, silos, plan_of,
                          truth_weights, weigh_event_ids, weight_rows, gps_rows,
                          gps_per_truck, corrupted, corrupted_idx)

    store_path = out_dir / "scenario.sqlite"
    write_ocel(log, store_path, overwrite=True)
    gps_path = out_dir / "gps.csv"
    gps_path.write_text(
        "\n".join([_csv_line(GPS_HEADERS)] + [_csv_line(r) for r in gps_rows]) + "\n",
        encoding="utf-8")
    weight_path = out_dir / "weights.csv"
    weight_path.write_text(
        "\n".join([_csv_line(WEIGHT_HEADERS)] + [_csv_line(r) for r in weight_rows]) + "\n",
        encoding="utf-8")
    truth_path = out_dir / "ground_truth.json"
    truth_path.write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    return ScenarioArtifacts(store_path=store_path, gps_path=gps_path,
                             weight_path=weight_path, truth_path=truth_path,
                             truth=truth)


def _expected_dfg(events, e2o, object_ids) -> list:
    """Consecutive-activity pairs over the given objects' event traces."""
    by_event = {ev.id: ev for ev in events}
    counts: dict = {}
    for object_id in object_ids:
        seen = set()
        related = []
        for rel in e2o:
            if rel.object_id == object_id and rel.event_id not in seen:
                seen.add(rel.event_id)
                related.append(by_event[rel.event_id])
        related.sort(key=lambda ev: (ev.time, ev.id))
        for prev, nxt in zip(related, related[1:]):
            key = (prev.activity, nxt.activity)
            counts[key] = counts.get(key, 0) + 1
    return [[s, t, c] for (s, t), c in sorted(counts.items())]


def _ground_truth(params, log, trucks, cargos, plans, silos, plan_of,
                  truth_weights, weigh_event_ids, weight_rows, gps_rows,
                  gps_per_truck, corrupted, corrupted_idx) -> dict:
    truck_count = len(trucks)
    per_activity = {a: truck_count for a in ACTIVITIES}
    per_otype = {"Truck": truck_count, "Cargo": truck_count,
                 "PickupPlan": len(plans), "Silo": len(silos)}
    stats = {
        "event_count": 5 * truck_count,
        "object_count": 2 * truck_count + len(plans) + len(silos),
        "activity_count": len(ACTIVITIES),
        "object_type_count": 4,
        "e2o_count": 10 * truck_count,
        "o2o_count": 2 * truck_count,
        "per_activity_counts": per_activity,
        "per_object_type_counts": per_otype,
    }

    dfg = {
        "Truck": _expected_dfg(log.events, log.e2o, trucks),
        "Cargo": _expected_dfg(log.events, log.e2o, list(cargos.values())),
        "PickupPlan": _expected_dfg(log.events, log.e2o, plans),
        "Silo": _expected_dfg(log.events, log.e2o, silos),
    }

    # enrichment oracles -------------------------------------------------
    expected_weight_rows = {}
    expected_min_loaded = {}
    for truck in trucks:
        w = truth_weights[truck]
        empty_time = next(ev.time for ev in log.events
                          if ev.id == weigh_event_ids[truck]["empty"])
        loaded_time = next(ev.time for ev in log.events
                           if ev.id == weigh_event_ids[truck]["loaded"])
        expected_weight_rows[truck] = [
            [w["empty_kg"], epoch_ms(empty_time)],
            [w["loaded_kg"], epoch_ms(loaded_time)],
        ]
        expected_min_loaded[weigh_event_ids[truck]["loaded"]] = w["loaded_kg"]

    expected_avg_speed = {}
    gps_valid = 0
    summary: dict = {}
    for truck in trucks:
        speeds = []
        for row_idx in gps_per_truck[truck]:
            if row_idx in corrupted_idx:
                continue
            speeds.append(float(gps_rows[row_idx][4]))
        gps_valid += len(speeds)
        if speeds:
            expected_avg_speed[truck] = float(sum(speeds)) / len(speeds)
            summary[f"gps-{truck}"] = {
                "device_type": "gps", "device_kind": "sensor",
                "reading_count": len(speeds),
                "properties": {"speed_kmh": len(speeds)},
            }
    summary["weighbridge-1"] = {
        "device_type": "scale", "device_kind": "sensor",
        "reading_count": len(weight_rows),
        "properties": {"weight_kg": len(weight_rows)},
    }

    return {
        "params": {
            "seed": params.seed, "truck_count": params.truck_count,
            "plan_count": params.plan_count, "anomaly_rate": params.anomaly_rate,
            "corruption_count": params.corruption_count,
        },
        "base_time": format_timestamp(BASE_TIME),
        "activities": list(ACTIVITIES),
        "stats": stats,
        "dfg": dfg,
        "truck_weights": truth_weights,
        "anomalous_truck_ids": sorted(t for t in trucks if truth_weights[t]["anomalous"]),
        "weigh_event_ids": weigh_event_ids,
        "corrupted_gps_rows": corrupted,
        "gps_row_count": len(gps_rows),
        "gps_valid_count": gps_valid,
        "weight_row_count": len(weight_rows),
        "expected_weight_rows": expected_weight_rows,
        "expected_min_loaded": expected_min_loaded,
        "expected_avg_speed": expected_avg_speed,
        "expected_device_summary": summary,
        "plan_of_truck": plan_of,
    }

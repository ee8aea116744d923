#!/usr/bin/env python3
"""
Experiment Report Generator
Pools recorded measurement runs per power and compares pooled frequencies
with the potentia (`paqs report`)
"""
import logging
import math
import os

import pandas as pd

import config

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["Scenario", "PSA", "Basis", "Power", "Runs", "Shots", "Count",
                   "Frequency", "Potentia", "Deviation", "Bound"]


def display_header():
    print("=" * 60)
    print("📊 PAQS - RECORDED EXPERIMENT REPORT")
    print("=" * 60)
    print()


def summarize_runs(runs):
    """Pool counts across runs of the same (scenario, PSA, basis, power)"""
    if runs.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    keys = ["scenario", "psa", "basis", "power"]
    grouped = runs.groupby(keys, sort=False).agg(
        Runs=("run_id", "nunique"),
        Shots=("shots", "sum"),
        Count=("count", "sum"),
        Potentia=("potentia", "first"),
    ).reset_index()
    grouped = grouped.rename(columns={"scenario": "Scenario", "psa": "PSA", "basis": "Basis", "power": "Power"})
    grouped["Frequency"] = grouped["Count"] / grouped["Shots"]
    grouped["Deviation"] = (grouped["Frequency"] - grouped["Potentia"]).abs()
    grouped["Bound"] = [4.0 * math.sqrt(p * (1.0 - p) / n) for p, n in zip(grouped["Potentia"], grouped["Shots"])]
    return grouped[SUMMARY_COLUMNS]


def show_summary(summary):
    if summary.empty:
        print("❌ No recorded runs found")
        return
    for (scenario, psa, basis), block in summary.groupby(["Scenario", "PSA", "Basis"], sort=False):
        print(f"🧪 {scenario}: PSA {psa}, basis {basis}")
        print(f"   {'Power':<12} | {'Runs':>4} | {'Shots':>8} | {'Frequency':>15} | {'Potentia':>15}")
        print("   " + "-" * 66)
        for _, row in block.iterrows():
            mark = "🟢" if row["Deviation"] <= row["Bound"] + 1e-12 else "🔴"
            print(f"   {row['Power']:<12} | {row['Runs']:>4} | {row['Shots']:>8} | "
                  f"{config.fmt_real(row['Frequency']):>15} | {config.fmt_real(row['Potentia']):>15} {mark}")
        print()


def export_report_to_csv(summary, path):
    """Write the pooled summary as CSV"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    summary.to_csv(path, index=False, float_format=f"%.{config.SIG_DIGITS}g")
    logger.info("exported %d summary rows to %s", len(summary), path)
    return path

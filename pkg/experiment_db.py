#!/usr/bin/env python3
"""
Experiment Ledger
SQLite store of recorded measurement runs (`paqs measure --record`)
"""
import logging
import os
import sqlite3
from contextlib import closing
from datetime import datetime

import pandas as pd

from errors import ConfigError

logger = logging.getLogger(__name__)

RUN_COLUMNS = ["run_id", "recorded_at", "scenario", "psa", "basis", "shots", "seed",
               "generator", "psa_hash", "power", "potentia", "count"]


def connect(db_path):
    """Open the ledger, creating the file and tables on first use"""
    directory = os.path.dirname(db_path)
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        conn = sqlite3.connect(db_path)
    except (OSError, sqlite3.Error) as e:
        raise ConfigError(f"Cannot open experiment ledger {db_path!r}: {e}") from e

    conn.execute('''CREATE TABLE IF NOT EXISTS runs
                    (id INTEGER PRIMARY KEY AUTOINCREMENT,
                     recorded_at TEXT,
                     scenario TEXT,
                     psa TEXT,
                     basis TEXT,
                     shots INTEGER,
                     seed TEXT,
                     generator TEXT,
                     psa_hash TEXT)''')
    conn.execute('''CREATE TABLE IF NOT EXISTS run_counts
                    (run_id INTEGER REFERENCES runs(id) ON DELETE CASCADE,
                     position INTEGER,
                     power TEXT,
                     potentia REAL,
                     count INTEGER)''')
    return conn


def record_run(db_path, result, scenario_name, psa_hash, generator="PCG64"):
    """Store one ExperimentResult; returns the new run id"""
    with closing(connect(db_path)) as conn:
        with conn:
            cursor = conn.execute(
                'INSERT INTO runs (recorded_at, scenario, psa, basis, shots, seed, generator, psa_hash) '
                'VALUES (?, ?, ?, ?, ?, ?, ?, ?)',
                (datetime.now().isoformat(timespec="seconds"), scenario_name, result.psa_id,
                 result.basis_label, result.shots, str(result.seed), generator, psa_hash))
            run_id = cursor.lastrowid
            conn.executemany(
                'INSERT INTO run_counts (run_id, position, power, potentia, count) VALUES (?, ?, ?, ?, ?)',
                [(run_id, i, name, float(p), int(c))
                 for i, (name, p, c) in enumerate(zip(result.names, result.potentias, result.counts))])
    logger.info("recorded run %d (%s, %s) in %s", run_id, result.psa_id, result.basis_label, db_path)
    return run_id


def load_runs(db_path):
    """One row per (run, power), ordered by run id then basis position"""
    if not os.path.exists(db_path):
        return pd.DataFrame(columns=RUN_COLUMNS)
    with closing(connect(db_path)) as conn:
        frame = pd.read_sql_query(
            'SELECT r.id AS run_id, r.recorded_at, r.scenario, r.psa, r.basis, r.shots, r.seed, '
            'r.generator, r.psa_hash, c.power, c.potentia, c.count '
            'FROM runs r JOIN run_counts c ON c.run_id = r.id '
            'ORDER BY r.id, c.position', conn)
    frame["seed"] = frame["seed"].astype(str)
    return frame


def clear_runs(db_path):
    """Delete every recorded run; returns how many were removed"""
    if not os.path.exists(db_path):
        return 0
    with closing(connect(db_path)) as conn:
        with conn:
            count = conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0]
            conn.execute("DELETE FROM run_counts")
            conn.execute("DELETE FROM runs")
    logger.info("cleared %d runs from %s", count, db_path)
    return count

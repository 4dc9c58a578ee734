#!/usr/bin/env python3
"""Generate the desk-scale corpus, field mapping and fixture responses.

Output is deterministic for a given seed:

    python3 tools/make_desk_fixtures.py data/desk
"""

import argparse
import json
import random
from pathlib import Path

WORDS = """
soil nitrogen cycle forest canopy drought response wheat yield model
climate regional rainfall variability urban heat island sensor network
protein folding kinase signalling tumour growth cell membrane transport
graphene oxide thin film laser pulse quantum dot spectroscopy catalyst
migration labour market policy reform school choice voting behaviour
medieval manuscript tradition dialect syntax corpus annotation archive
bridge fatigue concrete steel fibre welding turbine blade vibration
reservoir sediment erosion river basin groundwater recharge aquifer
""".split()

SPECIAL_TITLES = [
    "HEE-GER: a systematic review of German economic evaluations of "
    "health care published 1990-2004",
    "Müller's löss: Ökologie der Böden",
    "Τα δάση της Ελλάδας και η κλιματική αλλαγή",
    "Children's health and the parents' income",
    "The of and",
    "2012",
    "O'Neill's rock'n'roll economics",
]

MAJORS = {
    "Life Sciences": ["Biology", "Medicine", "Agriculture"],
    "Natural Sciences": ["Chemistry", "Physics", "Geosciences"],
    "Engineering Sciences": ["Mechanical Engineering", "Civil Engineering"],
    "Humanities and Social Sciences": ["Economics", "History", "Linguistics"],
}

DOC_TYPES = [
    ("journal_article", 0.55), ("monograph", 0.07), ("edited_volume", 0.05),
    ("book_section", 0.1), ("conference_item", 0.1), ("working_paper", 0.05),
    ("dissertation", 0.04), ("research_report", 0.04),
]

JOURNALS = ["Journal of Soil Studies", "Annals of Applied Physics",
            "Economic Review Quarterly", "Zeitschrift für Geschichte"]


def pick_weighted(rng, items):
    r = rng.random()
    acc = 0.0
    for value, w in items:
        acc += w
        if r < acc:
            return value
    return items[-1][0]


def make_title(rng):
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(4, 9))).capitalize()


def make_records(rng, n):
    institutes = [f"I{i:02d}" for i in range(1, 13)]
    records = []
    for i in range(1, n + 1):
        rid = f"R{i:04d}"
        title = SPECIAL_TITLES[i - 1] if i <= len(SPECIAL_TITLES) else make_title(rng)
        doc_type = pick_weighted(rng, DOC_TYPES)
        year = "" if rng.random() < 0.04 else str(rng.randint(2006, 2016))
        k = rng.choices([0, 1, 2, 3], weights=[0.08, 0.62, 0.25, 0.05])[0]
        insts = rng.sample(institutes, k)
        if rng.random() < 0.03:
            insts.append("I99")  # not in the field mapping
        rec = {
            "record_id": rid,
            "title": title,
            "doi": f"10.{rng.randint(1000, 1200)}/desk.{i}" if rng.random() < 0.7 else "",
            "year": year,
            "doc_type": doc_type,
            "language": rng.choices(["en", "de", "fr", ""], weights=[6, 3, 0.5, 0.5])[0],
            "access": rng.choice(["public", "not_public", "no_text_deposited"]),
            "institutes": "|".join(insts),
            "author_count": "", "journal": "", "volume": "", "issue": "", "first_page": "",
        }
        if doc_type == "journal_article":
            rec["author_count"] = str(rng.randint(1, 12)) if rng.random() < 0.9 else ""
            rec["journal"] = rng.choice(JOURNALS)
            rec["volume"] = str(rng.randint(1, 60))
            rec["issue"] = str(rng.randint(1, 12))
            rec["first_page"] = str(rng.randint(1, 900))
        # shared citation impact, perturbed per database
        rec["_impact"] = 0.0 if rng.random() < 0.15 else rng.paretovariate(1.2) * 3
        for db, p in (("WoS", 0.55), ("Scopus", 0.62)):
            covered = rng.random() < p
            rec[f"covered_{db}"] = "1" if covered else "0"
            cites = ""
            if covered and rng.random() > 0.03:
                cites = str(noisy_count(rng, rec["_impact"]))
            rec[f"cites_{db}"] = cites
        records.append(rec)
    return records


def noisy_count(rng, impact):
    return max(0, int(round(impact * rng.uniform(0.7, 1.4) + rng.gauss(0, 1))))


def year_with_delta(rng, year):
    bucket = rng.choices([0, 1, -1, 2, -2], weights=[85, 4, 5, 3, 3])[0]
    if bucket == 2:
        return year + rng.randint(2, 4)
    if bucket == -2:
        return year - rng.randint(2, 4)
    return year + bucket


def authors_for(rng, count):
    n = count
    if count is not None:
        n = max(1, count + rng.choices([0, 1, -1, 3, -2], weights=[88, 3, 3, 4, 2])[0])
    else:
        n = rng.randint(1, 6)
    base = rng.randint(10_000, 90_000) * 100
    out = [{"AuN": f"author {base + j}", "AuId": base + j} for j in range(n)]
    if n > 1 and rng.random() < 0.1:
        out.append(dict(out[0]))  # repeated author slot, same id
    return out


class Entities:
    def __init__(self, rng):
        self.rng = rng
        self.next_id = 2_000_000_000

    def new_id(self):
        self.next_id += self.rng.randint(1, 997)
        return self.next_id

    def distractor(self):
        rng = self.rng
        e = {
            "Id": self.new_id(),
            "Ti": "distractor " + make_title(rng).lower(),
            "Y": rng.randint(2000, 2018),
            "CC": rng.randint(0, 40),
            "AA": [{"AuN": "someone", "AuId": rng.randint(1, 10**6)}],
            "J": {"JN": "unrelated letters", "JId": 1},
        }
        if rng.random() < 0.5:
            e["E"] = json.dumps({"DOI": f"10.5555/noise.{e['Id']}"})
        return e

    def matching(self, rec, kind):
        rng = self.rng
        year = int(rec["year"]) if rec["year"] else rng.randint(2006, 2016)
        ac = int(rec["author_count"]) if rec["author_count"] else None
        e = {
            "Id": self.new_id(),
            "Ti": rec["title"].lower(),
            "Y": year_with_delta(rng, year),
            "CC": noisy_count(rng, rec["_impact"]),
            "AA": authors_for(rng, ac),
        }
        ext = {}
        if kind == "doi":
            # title differs, DOI equal after case folding
            e["Ti"] = "retitled " + e["Ti"]
            ext["DOI"] = rec["doi"].upper() if rng.random() < 0.3 else rec["doi"]
        elif kind == "bib":
            e["Ti"] = "variant of " + e["Ti"]
            ext.update({"V": rec["volume"], "I": rec["issue"], "FP": rec["first_page"]})
            if rng.random() < 0.5:
                e["J"] = {"JN": rec["journal"].upper(), "JId": 7}
            else:
                ext["BV"] = rec["journal"]
        else:
            e["Ti"] = rec["title"].upper() + "."
            if rec["doi"] and rng.random() < 0.6:
                ext["DOI"] = rec["doi"]
            elif rng.random() < 0.2:
                ext["DOI"] = f"10.7777/other.{e['Id']}"
        if rec["journal"] and "J" not in e and rng.random() < 0.7:
            e["J"] = {"JN": rec["journal"], "JId": 7}
        if ext:
            e["E"] = json.dumps(ext) if rng.random() < 0.8 else ext
        return e


def with_logprob(entities, broken=False):
    lp = -15.0
    for e in entities:
        e["logprob"] = round(lp, 3)
        lp += 0.75 if broken else -0.75
    return {"expr": "", "entities": entities}


def match_kinds(rec):
    kinds = ["title"]
    if rec["doi"]:
        kinds.append("doi")
    if rec["doc_type"] == "journal_article" and rec["first_page"]:
        kinds.append("bib")
    return kinds


def make_fixtures(rng, records, count):
    ents = Entities(rng)
    out = {}
    for idx, rec in enumerate(records):
        kinds = match_kinds(rec)
        scenario = rng.choices(
            ["both_same", "exact_only", "words_only", "different_id", "none"],
            weights=[45, 4, 10, 4, 37])[0]
        if idx < 7:
            scenario = "both_same"
        kind = rng.choice(kinds)
        shared = ents.matching(rec, kind)

        exact = [ents.distractor() for _ in range(rng.choice([0, 0, 0, 1]))]
        words = [ents.distractor() for _ in range(rng.randint(0, count - 1))]
        if scenario in ("both_same", "exact_only", "different_id"):
            exact.insert(rng.randint(0, len(exact)), shared)
        if scenario in ("both_same", "words_only"):
            words.insert(rng.randint(0, len(words)), json.loads(json.dumps(shared)))
        if scenario == "different_id":
            other = ents.matching(rec, rng.choice(kinds))
            if rng.random() < 0.5 and "E" in shared:
                other["E"] = shared["E"]  # duplicate record, same DOI
            words.insert(rng.randint(0, len(words)), other)
        words = words[:count]
        out[(rec["record_id"], "title_exact")] = with_logprob(exact)
        out[(rec["record_id"], "title_words")] = with_logprob(words)
    return out


def write_tsv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(header) + "\n")
        for row in rows:
            f.write("\t".join(row[h] for h in header) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, default=20181)
    ap.add_argument("-n", type=int, default=200)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)

    records = make_records(rng, args.n)
    header = ["record_id", "title", "doi", "year", "doc_type", "language", "access",
              "institutes", "author_count", "journal", "volume", "issue", "first_page",
              "covered_WoS", "cites_WoS", "covered_Scopus", "cites_Scopus"]
    write_tsv(out / "corpus.tsv", header, records)

    with open(out / "fields.csv", "w", encoding="utf-8") as f:
        f.write("institute_id,major_field,subfield\n")
        majors = sorted(MAJORS)
        for i in range(1, 13):
            major = majors[(i - 1) % len(majors)]
            subs = MAJORS[major]
            f.write(f"I{i:02d},{major},{subs[(i - 1) // len(majors) % len(subs)]}\n")

    count = 10
    fixtures = make_fixtures(rng, records, count)
    # A malformed body, a rank-order anomaly and a missing response.
    malformed = ("R0042", "title_words")
    reversed_lp = ("R0043", "title_words")
    missing = ("R0044", "title_exact")
    fixtures[reversed_lp] = with_logprob(
        [e for e in fixtures[reversed_lp]["entities"]] or [Entities(rng).distractor()],
        broken=True)
    for mode in ("title_exact", "title_words"):
        (out / "fixtures" / mode).mkdir(parents=True, exist_ok=True)
        for old in (out / "fixtures" / mode).glob("*.json"):
            old.unlink()
    for (rid, mode), body in sorted(fixtures.items()):
        if (rid, mode) == missing:
            continue
        path = out / "fixtures" / mode / f"{rid}.json"
        if (rid, mode) == malformed:
            path.write_text('{"entities": [ {"Id": 1, "logprob"', encoding="utf-8")
        else:
            path.write_text(json.dumps(body, ensure_ascii=False, indent=1) + "\n",
                            encoding="utf-8")

    config = {
        "corpus": "corpus.tsv",
        "field_mapping": "fields.csv",
        "stopwords": "../stopwords.txt",
        "transport": {"kind": "fixture", "dir": "fixtures"},
        "request": {"count": count, "model": "latest"},
        "modes": ["title_exact", "title_words"],
        "parallelism": 4,
        "output_dir": "out",
        "benchmarks": ["WoS", "Scopus"],
        "database_name": "MA",
        "subset": {"year_min": 2008, "year_max": 2015, "require_institute": True},
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()

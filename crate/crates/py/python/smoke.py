"""Smoke test for the Python bindings: python python/smoke.py"""

import toponym_py as tp

tokens = tp.normalize("RT @ndtv: #KeralaFloods hit Kochi http://t.co/x")
assert [t["surface"] for t in tokens if t["kind"] == "WORD"][:3] == ["KeralaFloods", "Kerala", "Floods"], tokens
assert tp.normalized("Floods in  Kochi http://t.co/a") == tp.normalized("Floods in Kochi")

seg = tp.Segmenter({"nepal": 100, "quake": 50, "ne": 1, "pal": 1})
assert seg.segment("nepalquake") == ["nepal", "quake"]

ex = tp.Extractor()
out = ex.extract("Dengue cases rising in Tamil Nadu, hospitals full", id="t1")
names = [m["matched_text"] for m in out["mentions"]]
assert "Tamil Nadu" in names, names

hits = ex.lookup("song")
assert (hits[0]["lat"], hits[0]["lon"]) == (27.24641, 88.50622), hits[0]

uni = tp.Extractor(mode="uniloc")
assert uni.mode == "UNILOC"

report = ex.evaluate()
assert 0.0 <= report["precision"] <= 1.0 and report["tweets_evaluated"] > 0

s = tp.score([(["delhi", "song", "monsoon"], ["delhi"])])
assert abs(s["f_score"] - 0.5) < 1e-12, s

print(f"ok: {len(names)} mention(s), gold F={report['f_score']:.4f}")

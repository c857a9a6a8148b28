#!/usr/bin/env python3
"""Build and verify the bundled data: knowledge graph, rules, intent seeds,
query templates, generator script, and the 100-case evaluation corpus.

The corpus is CONSTRUCTED with tier-exclusive subsets so the ablation grid
has a designed outcome:

    category  size  resolved by                       correct in settings
    core       48   rule AND similarity               every setting
    R           2   rule only                         all but w/o-rule
    E          25   similarity only                   all but w/o-embedding
    L          10   generator (scripted) only         all but w/o-llm
    A           5   wrong similarity hit, repaired    all but w/o-embedding
                    by the feedback dialogue            and w/o-adapt
    U          10   nothing (intent has no template)  none

which yields accuracies all=0.90, w/o rule=0.88, w/o embedding=0.60,
w/o llm=0.80, w/o adapt=0.85.

After writing the files, this script rebuilds the engine from them and
verifies every case resolves exactly as designed (rule hits, nearest-seed
labels, similarity margins, scripted coverage), then runs the full grid
and asserts the table above. Run from the repository root:

    python3 tools/build_corpus.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

DATA = ROOT / "src" / "kbqa" / "data"

TAU = 0.80
HIT_MARGIN = 0.81  # designed similarity hits must clear this
MISS_MARGIN = 0.78  # designed misses must stay under this

# ---------------------------------------------------------------------------
# Knowledge graph
# company id == canonical lowercase name; fields:
# (city, industry, founded, employees, stock_price, chairman, dividend,
#  auditor, board_size, ticker)

COMPANIES = {
    "wanke": ("Shenzhen", "property", 1984, 140000, 18.6, "zhang wei", "annual", "meridian audit", 11, "WNK"),
    "pingan": ("Shenzhen", "insurance", 1988, 360000, 52.3, "li jing", "semiannual", "meridian audit", 15, "PAN"),
    "harbor dynamics": ("Shenzhen", "logistics", 1996, 5200, 24.1, "wang lei", "none", "meridian audit", 9, "HRD"),
    "quartz logistics": ("Hangzhou", "logistics", 2001, 4800, 15.2, "chen yan", "semiannual", "crestline audit", 9, "QLG"),
    "crimson energy": ("Chengdu", "energy", 1999, 8800, 31.7, "liu fang", "none", "meridian audit", 10, "CRE"),
    "azure telecom": ("Suzhou", "telecom", 2004, 20500, 9.8, "yang ming", "semiannual", "crestline audit", 8, "AZT"),
    "emerald retail": ("Qingdao", "retail", 2007, 12000, 7.4, "zhao jun", "none", "meridian audit", 7, "EMR"),
    "onyx motors": ("Chengdu", "automotive", 1995, 30200, 22.9, "huang li", "semiannual", "harborview audit", 7, "ONX"),
    "lunar textiles": ("Qingdao", "textiles", 1992, 6100, 5.6, "zhou qiang", "none", "crestline audit", 6, "LNT"),
    "solar foods": ("Xiamen", "food", 2010, 1900, 12.3, "wu xia", "semiannual", "meridian audit", 5, "SLF"),
    "delta shipping": ("Dalian", "logistics", 1994, 7700, 19.5, "xu ping", "none", "harborview audit", 8, "DLS"),
    "vertex software": ("Dalian", "software", 2012, 800, 44.2, "sun kai", "none", "crestline audit", 5, "VTX"),
    "summit media": ("Kunming", "media", 2003, 2600, 16.8, "ma lin", "semiannual", "meridian audit", 6, "SMM"),
    "beacon pharma": ("Shenzhen", "pharma", 1998, 9400, 38.1, "zhu hong", "annual", "meridian audit", 10, "BCP"),
    "cedar pharma": ("Kunming", "pharma", 2008, 3500, 27.6, "guo rui", "none", "crestline audit", 6, "CDP"),
    "willow mining": ("Harbin", "mining", 1997, 11300, 13.9, "luo bin", "semiannual", "meridian audit", 9, "WLM"),
    "granite mining": ("Harbin", "mining", 2005, 9900, 11.1, "gao shan", "none", "harborview audit", 8, "GRM"),
    "cobalt chemicals": ("Wuhan", "chemicals", 1991, 8300, 21.4, "tang jie", "semiannual", "meridian audit", 9, "CBC"),
    "amber insurance": ("Wuhan", "insurance", 2002, 15600, 29.3, "feng yu", "none", "crestline audit", 10, "AMI"),
    "ivory securities": ("Hangzhou", "finance", 1993, 4400, 35.5, "dong mei", "semiannual", "meridian audit", 8, "IVS"),
    "jade holdings": ("Hangzhou", "finance", 1990, 2100, 33.0, "xie tian", "annual", "meridian audit", 12, "JDH"),
    "coral foods": ("Xiamen", "food", 2011, 1400, 8.9, "han bo", "none", "crestline audit", 5, "CRF"),
    "falcon aviation": ("Chengdu", "aviation", 2000, 17800, 26.2, "cao li", "semiannual", "harborview audit", 9, "FLA"),
    "osprey robotics": ("Qingdao", "robotics", 2014, 600, 58.7, "deng ke", "none", "harborview audit", 5, "OSR"),
    "maple telecom": ("Suzhou", "telecom", 2009, 13100, 10.4, "peng wen", "semiannual", "crestline audit", 7, "MPT"),
    "aspen energy": ("Xiamen", "energy", 2013, 5000, 14.7, "yuan hao", "none", "harborview audit", 6, "ASE"),
}

INVESTORS = [
    "skylark fund", "bluestone partners", "ridgeline ventures", "palmgrove trust",
    "silverline capital", "northbay group", "eastgate fund", "westwood partners",
    "stonebridge ventures", "clearwater capital",
]

INVESTED_BY = {
    "harbor dynamics": INVESTORS[0:8],
    "quartz logistics": INVESTORS[0:6] + ["stonebridge ventures"],
    "crimson energy": INVESTORS[0:4] + ["eastgate fund", "clearwater capital"],
    "azure telecom": INVESTORS[0:3] + ["westwood partners", "clearwater capital"],
    "emerald retail": ["skylark fund", "bluestone partners", "palmgrove trust", "stonebridge ventures"],
    "onyx motors": ["ridgeline ventures", "eastgate fund", "clearwater capital"],
    "lunar textiles": ["silverline capital", "northbay group", "westwood partners"],
    "wanke": ["skylark fund", "bluestone partners"],
    "pingan": ["skylark fund", "ridgeline ventures"],
    "solar foods": ["northbay group", "clearwater capital"],
    "delta shipping": ["northbay group", "eastgate fund"],
    "vertex software": ["stonebridge ventures"],
    "cedar pharma": ["palmgrove trust"],
    "coral foods": ["westwood partners"],
    "jade holdings": ["silverline capital"],
}

PARENTS = {
    "jade holdings": ["quartz logistics", "onyx motors"],
    "amber insurance": ["lunar textiles"],
    "summit media": ["vertex software"],
    "cobalt chemicals": ["willow mining"],
    "delta shipping": ["solar foods"],
    "falcon aviation": ["osprey robotics"],
    "crimson energy": ["aspen energy"],
    "harbor dynamics": ["maple telecom"],
}

ALIASES = {"wanke": ["vanke"], "pingan": ["pingan group"]}

# ---------------------------------------------------------------------------
# Templates, rules

TEMPLATES = [
    ("hq_location", 'MATCH (c:Company {name:XX1})-[:located]->(x) RETURN x', 1),
    ("stock_price", 'MATCH (c:Company {name:XX1})-[:stock_price]->(x) RETURN x', 1),
    ("employee_count", 'MATCH (c:Company {name:XX1})-[:employees]->(x) RETURN x', 1),
    ("founding_year", 'MATCH (c:Company {name:XX1})-[:founded]->(x) RETURN x', 1),
    ("company_chairman", 'MATCH (c:Company {name:XX1})-[:chairman]->(x) RETURN x', 1),
    ("company_industry", 'MATCH (c:Company {name:XX1})-[:industry]->(x) RETURN x', 1),
    ("top_invested", 'MATCH (a:Company)-[:invested_by]->(b) RETURN a.name, COUNT(b) ORDER BY COUNT(b) DESC LIMIT 5', 0),
    ("investors_of", 'MATCH (c:Company {name:XX1})-[:invested_by]->(v) RETURN v.name', 1),
    ("subsidiaries_of", 'MATCH (p:Company {name:XX1})-[:parent_of]->(c) RETURN c.name', 1),
    ("parent_location", 'MATCH (p)-[:parent_of]->(c:Company {name:XX1}), (p)-[:located]->(x) RETURN p.name, x', 1),
    ("industry_peers", 'MATCH (c:Company {name:XX1})-[:industry]->(i)<-[:industry]-(o) RETURN o.name', 1),
    ("investor_count", 'MATCH (c:Company {name:XX1})-[:invested_by]->(b) RETURN COUNT(b)', 1),
    ("shared_investor", 'MATCH (a:Company {name:XX1})-[:invested_by]->(v)<-[:invested_by]-(b:Company {name:XX2}) RETURN v.name', 2),
    ("investor_portfolio", 'MATCH (a:Company)-[:invested_by]->(v:Investor {name:XX1}) RETURN a.name', 1),
]

RULES = [
    ("hq_location", [["headquarters"]], None),
    ("stock_price", [["stock"], ["price"]], None),
    ("employee_count", [["employees", "staff", "headcount"]], None),
    ("founding_year", [["founded", "founding"]], None),
    ("top_invested", [["popular"], ["investment", "invested"]], None),
    ("investors_of", [["investors", "backers"], ["name", "list", "who"]], None),
    ("subsidiaries_of", [["subsidiaries", "subsidiary"]], None),
]

# ---------------------------------------------------------------------------
# Case plan: per-intent entity allocations

HQ_CORE = ["wanke", "harbor dynamics", "quartz logistics", "crimson energy",
           "emerald retail", "delta shipping", "falcon aviation", "beacon pharma",
           "cobalt chemicals", "ivory securities"]
STOCK_CORE = ["wanke", "pingan", "harbor dynamics", "azure telecom",
              "jade holdings", "maple telecom", "aspen energy", "osprey robotics"]
EMP_CORE = ["wanke", "pingan", "quartz logistics", "emerald retail",
            "vertex software", "amber insurance", "coral foods"]
FOUNDED_CORE = ["wanke", "pingan", "crimson energy", "solar foods",
                "willow mining", "falcon aviation"]
INVESTORS_OF_CORE = ["harbor dynamics", "quartz logistics", "crimson energy",
                     "emerald retail", "wanke", "delta shipping"]
SUBS_CORE = ["jade holdings", "amber insurance", "summit media",
             "cobalt chemicals", "falcon aviation", "delta shipping"]
CHAIR_E = ["wanke", "pingan", "harbor dynamics", "delta shipping",
           "ivory securities", "beacon pharma"]
CHAIR_L = ["quartz logistics", "emerald retail"]
IND_E = ["wanke", "harbor dynamics", "emerald retail", "beacon pharma"]
IND_L = ["delta shipping"]
PARENT_E = ["quartz logistics", "lunar textiles", "vertex software", "solar foods"]
PARENT_L = ["osprey robotics", "aspen energy"]
PEERS_E = ["beacon pharma", "willow mining", "azure telecom", "crimson energy"]
PEERS_L = ["maple telecom", "solar foods"]
INVCOUNT_E = ["wanke", "harbor dynamics", "quartz logistics"]
INVCOUNT_L = ["crimson energy"]
SHARED_E = [("wanke", "pingan"), ("solar foods", "delta shipping")]
SHARED_L = [("harbor dynamics", "quartz logistics")]
PORTFOLIO_E = ["skylark fund", "bluestone partners"]
PORTFOLIO_L = ["ridgeline ventures"]

TOP_INVESTED_QUESTIONS = [
    "Please name the five most popular investment companies.",
    "Name the five most popular investment companies please.",
    "Five most popular investment companies?",
    "What are the five most popular investment companies?",
    "List the five most popular investment companies.",
    "Most popular investment companies in the market?",
]

# ---------------------------------------------------------------------------
# Gold derivation (independent of the query engine: plain dict arithmetic)


def peers_of(company: str) -> set[str]:
    industry = COMPANIES[company][1]
    return {c for c, row in COMPANIES.items() if row[1] == industry}


def top5_invested() -> list[str]:
    counts = {c: len(set(v)) for c, v in INVESTED_BY.items()}
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    cutoff = ranked[4][1]
    assert ranked[5][1] < cutoff, "top-5 cutoff must be unambiguous"
    return [c for c, _ in ranked[:5]]


def parent_of(company: str) -> str:
    for parent, children in PARENTS.items():
        if company in children:
            return parent
    raise KeyError(company)


def shared_investors(a: str, b: str) -> set[str]:
    return set(INVESTED_BY.get(a, ())) & set(INVESTED_BY.get(b, ()))


def portfolio_of(investor: str) -> set[str]:
    return {c for c, invs in INVESTED_BY.items() if investor in invs}


GOLDS = {
    "hq_location": lambda e: {COMPANIES[e][0]},
    "stock_price": lambda e: {COMPANIES[e][4]},
    "employee_count": lambda e: {COMPANIES[e][3]},
    "founding_year": lambda e: {COMPANIES[e][2]},
    "company_chairman": lambda e: {COMPANIES[e][5]},
    "company_industry": lambda e: {COMPANIES[e][1]},
    "investors_of": lambda e: set(INVESTED_BY[e]),
    "subsidiaries_of": lambda e: set(PARENTS[e]),
    "parent_location": lambda e: {parent_of(e), COMPANIES[parent_of(e)][0]},
    "industry_peers": lambda e: peers_of(e),
    "investor_count": lambda e: {len(set(INVESTED_BY[e]))},
    "investor_portfolio": lambda e: portfolio_of(e),
}


# ---------------------------------------------------------------------------
# Corpus assembly

SIGNATURES = {
    # setting order: all, w/o rule, w/o embedding, w/o llm, w/o adapt
    "core": (True, True, True, True, True),
    "R": (True, False, True, True, True),
    "E": (True, True, False, True, True),
    "L": (True, True, True, False, True),
    "A": (True, True, False, True, False),
    "U": (False, False, False, False, False),
}


def build_cases() -> tuple[list[dict], list[dict], list[dict]]:
    """Returns (cases, seeds, scripted_entries)."""
    cases: list[dict] = []
    seeds: dict[str, list[str]] = {}
    scripted: list[dict] = []
    counters: dict[str, int] = {}

    def seed(intent: str, example: str) -> None:
        seeds.setdefault(intent, [])
        if example not in seeds[intent]:
            seeds[intent].append(example)

    def case(category, intent, question, entities, gold, kind, wrong_intent=None):
        counters[category] = counters.get(category, 0) + 1
        cases.append(
            {
                "id": f"{category.lower()}-{intent}-{counters[category]:02d}",
                "question": question,
                "gold_intent": intent,
                "gold_entities": list(entities),
                "gold_answer_values": sorted(gold, key=lambda v: (isinstance(v, str), str(v))),
                "kind": kind,
                "category": category,
                "wrong_intent": wrong_intent,
            }
        )

    # -- core: rule + similarity ------------------------------------------
    for i, e in enumerate(HQ_CORE):
        seed("hq_location", f"where is the headquarters of {e} company located")
        q = (
            f"Where is the headquarters of {e.title()} company located?"
            if i % 2 == 0
            else f"Where is the headquarters of {e} located?"
        )
        case("core", "hq_location", q, [e], GOLDS["hq_location"](e), "simple")

    for i, e in enumerate(STOCK_CORE):
        seed("stock_price", f"what is the current stock price of {e}")
        q = (
            f"What is the current stock price of {e}?"
            if (i % 2 == 0 or len(e.split()) == 1)
            else f"Tell me the current stock price of {e}."
        )
        case("core", "stock_price", q, [e], GOLDS["stock_price"](e), "simple")

    for i, e in enumerate(EMP_CORE):
        seed("employee_count", f"how many employees does {e} have")
        q = (
            f"How many employees does {e} have?"
            if i % 2 == 0
            else f"How many employees work at {e}?"
        )
        case("core", "employee_count", q, [e], GOLDS["employee_count"](e), "simple")

    for i, e in enumerate(FOUNDED_CORE):
        seed("founding_year", f"when was {e} company founded")
        q = f"When was {e} company founded?" if i % 2 == 0 else f"When was {e} founded?"
        case("core", "founding_year", q, [e], GOLDS["founding_year"](e), "simple")

    seed("top_invested", "please name the five most popular investment companies")
    seed("top_invested", "most popular investment companies in the market")
    for q in TOP_INVESTED_QUESTIONS:
        case("core", "top_invested", q, [], set(top5_invested()), "complex")

    for i, e in enumerate(INVESTORS_OF_CORE):
        seed("investors_of", f"name the investors standing behind {e}")
        q = (
            f"Name the investors standing behind {e}."
            if i % 2 == 0
            else f"Who are the investors standing behind {e}?"
        )
        case("core", "investors_of", q, [e], GOLDS["investors_of"](e), "complex")

    for i, e in enumerate(SUBS_CORE[:5]):
        seed("subsidiaries_of", f"name the subsidiaries held by {e}")
        q = (
            f"Name the subsidiaries held by {e}."
            if i % 2 == 0
            else f"Name the subsidiaries of {e}."
        )
        case("core", "subsidiaries_of", q, [e], GOLDS["subsidiaries_of"](e), "complex")

    # -- R: rule only ------------------------------------------------------
    case("R", "hq_location", "Headquarters of pingan?", ["pingan"],
         GOLDS["hq_location"]("pingan"), "simple")
    case("R", "hq_location", "Headquarters for summit media?", ["summit media"],
         GOLDS["hq_location"]("summit media"), "simple")

    # -- E: similarity only ------------------------------------------------
    for i, e in enumerate(CHAIR_E):
        seed("company_chairman", f"who is the chairman of {e}")
        q = (
            f"Who is the chairman of {e}?"
            if i % 2 == 0
            else f"Who is the chairman of {e} company?"
        )
        case("E", "company_chairman", q, [e], GOLDS["company_chairman"](e), "simple")

    for i, e in enumerate(IND_E):
        seed("company_industry", f"what industry does {e} operate in")
        q = (
            f"What industry does {e} operate in?"
            if i % 2 == 0
            else f"What industry does {e} company operate in?"
        )
        case("E", "company_industry", q, [e], GOLDS["company_industry"](e), "simple")

    for i, e in enumerate(PARENT_E):
        seed("parent_location", f"where is the parent company of {e} located")
        q = (
            f"Where is the parent company of {e} located?"
            if i % 2 == 0
            else f"Where is the parent of {e} located?"
        )
        case("E", "parent_location", q, [e], GOLDS["parent_location"](e), "complex")

    for e in PEERS_E:
        seed("industry_peers", f"which companies share an industry with {e}")
        case("E", "industry_peers", f"Which companies share an industry with {e}?",
             [e], GOLDS["industry_peers"](e), "complex")

    for e in INVCOUNT_E:
        seed("investor_count", f"how many investors does {e} have")
        case("E", "investor_count", f"How many investors does {e} have?",
             [e], GOLDS["investor_count"](e), "complex")

    for a, b in SHARED_E:
        seed("shared_investor", f"which investors back both {a} and {b}")
        case("E", "shared_investor", f"Which investors back both {a} and {b}?",
             [a, b], shared_investors(a, b), "complex")

    for e in PORTFOLIO_E:
        seed("investor_portfolio", f"which companies sit in the portfolio of {e}")
        case("E", "investor_portfolio", f"Which companies sit in the portfolio of {e}?",
             [e], GOLDS["investor_portfolio"](e), "complex")

    # -- L: scripted generator only ----------------------------------------
    l_cases = [
        ("company_chairman", f"Identify the person steering {CHAIR_L[0]}.", [CHAIR_L[0]], "simple"),
        ("company_chairman", f"Identify the person heading {CHAIR_L[1]}.", [CHAIR_L[1]], "simple"),
        ("company_industry", f"Classify the line of business at {IND_L[0]}.", [IND_L[0]], "simple"),
        ("parent_location", f"Which city hosts the corporate parent of {PARENT_L[0]}?", [PARENT_L[0]], "complex"),
        ("parent_location", f"Name the town where the owner firm of {PARENT_L[1]} sits.", [PARENT_L[1]], "complex"),
        ("industry_peers", f"Rivals operating the same trade as {PEERS_L[0]}?", [PEERS_L[0]], "complex"),
        ("industry_peers", f"Other firms in the trade of {PEERS_L[1]}?", [PEERS_L[1]], "complex"),
        ("investor_count", f"Tally the funds backing {INVCOUNT_L[0]}.", [INVCOUNT_L[0]], "complex"),
        ("shared_investor", f"Common money sources between {SHARED_L[0][0]} and {SHARED_L[0][1]}?",
         list(SHARED_L[0]), "complex"),
        ("investor_portfolio", f"Firms held inside the {PORTFOLIO_L[0]} basket?", [PORTFOLIO_L[0]], "complex"),
    ]
    for intent, q, entities, kind in l_cases:
        if intent == "shared_investor":
            gold = shared_investors(*entities)
        else:
            gold = GOLDS[intent](entities[0])
        case("L", intent, q, entities, gold, kind)
        scripted.append({"question": q, "intent": intent})

    # -- A: wrong similarity hit, repaired by the feedback dialogue ---------
    # Each has a designed "wrong" seed it collides with.
    seed("company_industry", "what industry does cedar pharma operate in")
    case("A", "industry_peers", "What peers operate in the cedar pharma industry?",
         ["cedar pharma"], GOLDS["industry_peers"]("cedar pharma"), "complex",
         wrong_intent="company_industry")

    seed("parent_location", "where is the parent company of onyx motors located")
    case("A", "hq_location", "Where is the company onyx motors located?",
         ["onyx motors"], GOLDS["hq_location"]("onyx motors"), "simple",
         wrong_intent="parent_location")

    seed("industry_peers", "which companies share an industry with coral foods")
    case("A", "company_industry", "Which industry do companies share with coral foods?",
         ["coral foods"], GOLDS["company_industry"]("coral foods"), "simple",
         wrong_intent="industry_peers")

    seed("investors_of", "list the many investors behind azure telecom")
    case("A", "investor_count", "How many investors behind azure telecom?",
         ["azure telecom"], GOLDS["investor_count"]("azure telecom"), "complex",
         wrong_intent="investors_of")

    seed("company_industry", "what industry does granite mining operate in")
    case("A", "industry_peers", "What rivals operate in the granite mining industry?",
         ["granite mining"], GOLDS["industry_peers"]("granite mining"), "complex",
         wrong_intent="company_industry")

    # -- U: unanswerable (gold intent has no query template) ----------------
    annual = sorted(c for c, row in COMPANIES.items() if row[6] == "annual")
    auditors = [row[7] for row in COMPANIES.values()]
    busiest_auditor = max(set(auditors), key=auditors.count)
    cities = [row[0] for row in COMPANIES.values()]
    top_city = max(set(cities), key=cities.count)
    industries = [row[1] for row in COMPANIES.values()]
    top_industry = max(set(industries), key=industries.count)
    oldest = min(COMPANIES, key=lambda c: COMPANIES[c][2])
    pre2000 = sum(1 for row in COMPANIES.values() if row[2] < 2000)
    jade_board_total = sum(COMPANIES[c][8] for c in PARENTS["jade holdings"])
    busiest_investor = max(
        INVESTORS, key=lambda inv: (len(portfolio_of(inv)), inv)
    )

    u_cases = [
        ("dividend_policy", "What dividend does jade holdings pay?", ["jade holdings"],
         {COMPANIES["jade holdings"][6]}, "simple"),
        ("auditor_of", "Which auditor signs off the coral foods accounts?", ["coral foods"],
         {COMPANIES["coral foods"][7]}, "simple"),
        ("busiest_auditor", "Which auditor serves the most companies?", [],
         {busiest_auditor}, "complex"),
        ("dividend_payers", "List every company paying an annual dividend.", [],
         set(annual), "complex"),
        ("board_total", "What is the combined board size of the companies jade holdings controls?",
         ["jade holdings"], {jade_board_total}, "complex"),
        ("top_city", "Which city hosts the largest number of companies?", [],
         {top_city}, "complex"),
        ("top_industry", "Which industry counts the most companies?", [],
         {top_industry}, "complex"),
        ("oldest_ticker", "Which ticker belongs to the oldest company?", [],
         {COMPANIES[oldest][9]}, "complex"),
        ("pre2000_count", "How many companies date from before the year 2000?", [],
         {pre2000}, "complex"),
        ("busiest_investor", "Which investor appears across the most portfolios?", [],
         {busiest_investor}, "complex"),
    ]
    for intent, q, entities, gold, kind in u_cases:
        case("U", intent, q, entities, gold, kind)

    seed_records = [
        {"label": intent, "examples": examples} for intent, examples in seeds.items()
    ]
    return cases, seed_records, scripted


# ---------------------------------------------------------------------------
# File emission


def write_triples() -> None:
    rows: list[tuple[str, str, str, str]] = []
    for company, (city, industry, founded, employees, price, chairman,
                  dividend, auditor, board, ticker) in COMPANIES.items():
        rows.append((company, "name", company, "string"))
        rows.append((company, "label", "Company", "string"))
        rows.append((company, "located", city, "string"))
        rows.append((company, "industry", industry, "string"))
        rows.append((company, "founded", str(founded), "number"))
        rows.append((company, "employees", str(employees), "number"))
        rows.append((company, "stock_price", str(price), "number"))
        rows.append((company, "chairman", chairman, "string"))
        rows.append((company, "dividend", dividend, "string"))
        rows.append((company, "auditor", auditor, "string"))
        rows.append((company, "board_size", str(board), "number"))
        rows.append((company, "ticker", ticker, "string"))
    for investor in INVESTORS:
        rows.append((investor, "name", investor, "string"))
        rows.append((investor, "label", "Investor", "string"))
    for company, investors in INVESTED_BY.items():
        for investor in investors:
            rows.append((company, "invested_by", investor, "entity"))
    for parent, children in PARENTS.items():
        for child in children:
            rows.append((parent, "parent_of", child, "entity"))
    for company, aliases in ALIASES.items():
        for alias in aliases:
            rows.append((company, "alias", alias, "string"))

    import csv

    with open(DATA / "triples.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerows(rows)


def write_rules() -> None:
    with open(DATA / "rules.jsonl", "w", encoding="utf-8") as fh:
        for label, groups, pattern in RULES:
            fh.write(json.dumps(
                {"label": label, "keyword_groups": groups, "pattern": pattern},
                ensure_ascii=False) + "\n")


def write_templates() -> None:
    with open(DATA / "query_templates.jsonl", "w", encoding="utf-8") as fh:
        for intent, cql, arity in TEMPLATES:
            fh.write(json.dumps(
                {"intent": intent, "cql": cql, "arity": arity}, ensure_ascii=False) + "\n")


def write_seeds(seed_records: list[dict]) -> None:
    with open(DATA / "intent_seeds.jsonl", "w", encoding="utf-8") as fh:
        for record in seed_records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_llm_script(scripted: list[dict], cleaned_by_question: dict[str, str]) -> None:
    with open(DATA / "llm_script.jsonl", "w", encoding="utf-8") as fh:
        for entry in scripted:
            cleaned = cleaned_by_question[entry["question"]]
            fh.write(json.dumps(
                {
                    "template_id": "intent_fallback",
                    "match": {"question": cleaned},
                    "reply": (
                        "Reasoning: the phrasing maps onto a known relation.\n"
                        f"intent: {entry['intent']}"
                    ),
                },
                ensure_ascii=False) + "\n")
        fh.write(json.dumps({
            "template_id": "intent_fallback",
            "default": "Reasoning: the request matches no known relation.\nUnable to classify.",
        }) + "\n")
        fh.write(json.dumps({
            "template_id": "answer_render",
            "default": "Based on the knowledge graph: {{knowledge}}",
        }) + "\n")


def write_cases(cases: list[dict]) -> None:
    with open(DATA / "eval_cases.jsonl", "w", encoding="utf-8") as fh:
        for c in cases:
            record = {k: v for k, v in c.items() if k not in ("category", "wrong_intent")}
            record["category"] = c["category"]  # kept: harmless extra key for audits
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Verification


def verify(cases: list[dict]) -> None:
    from kbqa.config import ServiceConfig
    from kbqa.engine import Engine
    from kbqa.evalharness import GRID_SETTINGS, ablation_grid, load_dataset, render_grid_table
    from kbqa.intent import match_rules, nearest_intent
    from kbqa.preprocess import RawQuestion, clean

    config = ServiceConfig()
    engine = Engine(config)

    simple = sum(1 for c in cases if c["kind"] == "simple")
    complex_ = sum(1 for c in cases if c["kind"] == "complex")
    assert (simple, complex_) == (50, 50), (simple, complex_)

    scripted_questions = {
        c["question"] for c in cases if c["category"] == "L"
    }

    for c in cases:
        clean_q = clean(RawQuestion(c["question"]), engine.stoplist, engine.lexicon.surfaces())
        rule_label = match_rules(clean_q, engine.rules)
        nearest = nearest_intent(engine.embedder.embed(clean_q.text), engine.base)
        near_label, near_sim = (nearest[0].label, nearest[1]) if nearest else (None, -1.0)
        cat = c["category"]

        if cat in ("core", "R"):
            assert rule_label == c["gold_intent"], (c["id"], rule_label)
        else:
            assert rule_label is None, (c["id"], rule_label)

        if cat in ("core", "E"):
            assert near_label == c["gold_intent"] and near_sim >= HIT_MARGIN, (
                c["id"], near_label, round(near_sim, 3))
        elif cat == "A":
            assert near_label == c["wrong_intent"] and near_sim >= HIT_MARGIN, (
                c["id"], near_label, round(near_sim, 3))
        else:  # R, L, U must miss the similarity tier
            assert near_sim <= MISS_MARGIN, (c["id"], near_label, round(near_sim, 3))

        if cat == "L":
            assert c["question"] in scripted_questions

    grid = ablation_grid(load_dataset(DATA / "eval_cases.jsonl"), config)
    expected = {
        "all": 0.90,
        "w/o rule": 0.88,
        "w/o embedding": 0.60,
        "w/o llm": 0.80,
        "w/o adapt": 0.85,
    }
    print(render_grid_table(grid))
    for name, _ in GRID_SETTINGS:
        got = grid[name].accuracy
        assert got == expected[name], (name, got, expected[name])

    # Per-case signatures: which settings must answer which category.
    by_case = {
        name: {c.case_id: c.correct for c in grid[name].per_case}
        for name, _ in GRID_SETTINGS
    }
    for c in cases:
        signature = tuple(by_case[name][c["id"]] for name, _ in GRID_SETTINGS)
        assert signature == SIGNATURES[c["category"]], (c["id"], signature)

    print(f"verified {len(cases)} cases: all designed tier assignments hold")


def main() -> None:
    cases, seed_records, scripted = build_cases()
    assert len(cases) == 100, len(cases)

    write_triples()
    write_rules()
    write_templates()
    write_seeds(seed_records)
    write_cases(cases)

    # The scripted replies key on the *cleaned* question text, which needs
    # the stoplist and lexicon files written above.
    from kbqa.graph import TripleStore
    from kbqa.ingest import load_triples
    from kbqa.preprocess import RawQuestion, clean, load_stoplist
    from kbqa.respond import build_lexicon

    stoplist = load_stoplist(DATA / "stopwords_en.txt")
    store = TripleStore()
    load_triples(DATA / "triples.csv", store)
    lexicon = build_lexicon(store)
    cleaned = {
        q: clean(RawQuestion(q), stoplist, lexicon.surfaces()).text
        for q in {e["question"] for e in scripted}
    }
    write_llm_script(scripted, cleaned)

    verify(cases)


if __name__ == "__main__":
    main()

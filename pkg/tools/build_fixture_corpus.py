"""Regenerate the shipped fixture corpora under src/hygraph/data/.

* ``gp2004.jsonl``   the single walkthrough instance (2004 United States
  Grand Prix qualifying, 20 rows, Pos/Driver/Constructor/Time/Gap).
* ``sample25.jsonl`` that instance plus 24 instances over four fictional
  tables (two marathon results, two film-festival winner lists).
* ``scripts.json``   per-question behaviour of the scripted stand-in model:
  the analysis it returns and the evidence its reader needs before it
  commits to the gold answer.

Usage: python tools/build_fixture_corpus.py
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "hygraph" / "data"

# ---------------------------------------------------------------------------
# 2004 United States Grand Prix qualifying

DRIVERS = [
    ("Rubens Barrichello", "Ferrari", "Rubens Gonçalves Barrichello ( born 23 May 1972 ) is a Brazilian racing driver who competed in Formula One for Jordan , Stewart , Ferrari , Honda , Brawn GP and Williams . He finished runner-up in the drivers' standings in 2002 and 2004 ."),
    ("Michael Schumacher", "Ferrari", "Michael Schumacher ( born 3 January 1969 ) is a retired German racing driver who raced in Formula One for Jordan Grand Prix , Benetton and Ferrari , where he spent most of his career , as well as for Mercedes upon his return to the sport . Widely regarded as one of the greatest Formula One drivers ever , Schumacher is the only driver in history to win seven Formula One World Championships , five of which he won consecutively ."),
    ("Takuma Sato", "BAR-Honda", "Takuma Sato ( born 28 January 1977 ) is a Japanese racing driver . He raced in Formula One for Jordan , BAR and Super Aguri , and later moved to IndyCar , winning the Indianapolis 500 in 2017 and 2020 ."),
    ("Jenson Button", "BAR-Honda", "Jenson Alexander Lyons Button MBE ( born 19 January 1980 ) is a British racing driver and former Formula One driver . He won the 2009 Formula One World Championship , driving for Brawn GP . He currently competes in the Japanese Super GT Series driving a Honda NSX-GT for Team Kunimitsu , in which he won the title in 2018 . Button began karting at the age of eight and achieved early success ."),
    ("Jarno Trulli", "Renault", "Jarno Trulli ( born 13 July 1974 ) is an Italian former racing driver . He started 252 races in Formula One and took his only victory at the Monaco Grand Prix while driving for Renault ."),
    ("Kimi Räikkönen", "McLaren-Mercedes", "Kimi-Matias Räikkönen ( born 17 October 1979 ) is a Finnish racing driver nicknamed The Iceman . He won the 2007 Formula One World Championship driving for Ferrari , having previously raced for Sauber and McLaren ."),
    ("Ralf Schumacher", "Williams-BMW", "Ralf Schumacher ( born 30 June 1975 ) is a German former racing driver and the younger brother of Michael Schumacher . He won six Grands Prix in Formula One , all of them with Williams ."),
    ("Juan Pablo Montoya", "Williams-BMW", "Juan Pablo Montoya Roldán ( born 20 September 1975 ) is a Colombian racing driver . After winning the CART title in 1999 and the Indianapolis 500 in 2000 , he joined the British team Williams in Formula One and later drove for McLaren ."),
    ("Olivier Panis", "Toyota", "Olivier Panis ( born 2 September 1966 ) is a French former racing driver . He won the rain-affected Monaco Grand Prix in 1996 for Ligier and ended his career with Toyota ."),
    ("Fernando Alonso", "Renault", "Fernando Alonso Díaz ( born 29 July 1981 ) is a Spanish racing driver . He won back-to-back titles in 2005 and 2006 with Renault and has also raced for Minardi , McLaren , Ferrari and Aston Martin ."),
    ("Mark Webber", "Jaguar-Cosworth", "Mark Alan Webber AO ( born 27 August 1976 ) is an Australian former racing driver . He raced in Formula One for Minardi , Jaguar , Williams and Red Bull Racing and later won the World Endurance Championship with Porsche ."),
    ("Cristiano da Matta", "Toyota", "Cristiano da Matta ( born 19 September 1973 ) is a Brazilian former racing driver . He won the CART championship in 2002 before spending two seasons in Formula One with Toyota ."),
    ("David Coulthard", "McLaren-Mercedes", "David Marshall Coulthard MBE ( born 27 March 1971 ) is a Scottish former racing driver turned broadcaster . He won 13 Grands Prix , mostly with McLaren , and finished runner-up in the championship in 2001 ."),
    ("Christian Klien", "Jaguar-Cosworth", "Christian Klien ( born 7 February 1983 ) is an Austrian racing driver who made his Formula One debut with Jaguar in 2004 and later drove for Red Bull Racing and HRT ."),
    ("Felipe Massa", "Sauber-Petronas", "Felipe Massa ( born 25 April 1981 ) is a Brazilian racing driver . He drove for Sauber , Ferrari and Williams , and lost the 2008 title by a single point ."),
    ("Giancarlo Fisichella", "Sauber-Petronas", "Giancarlo Fisichella ( born 14 January 1973 ) is an Italian racing driver . He won three Grands Prix in Formula One with Jordan and Renault ."),
    ("Nick Heidfeld", "Jordan-Ford", "Nick Lars Heidfeld ( born 10 May 1977 ) is a German former racing driver . He holds the record for the most podium finishes without a win in Formula One ."),
    ("Giorgio Pantano", "Jordan-Ford", "Giorgio Pantano ( born 4 February 1979 ) is an Italian racing driver . He raced for Jordan in 2004 and won the GP2 Series in 2008 ."),
    ("Gianmaria Bruni", "Minardi-Cosworth", "Gianmaria Bruni ( born 30 May 1981 ) is an Italian racing driver who drove for Minardi in 2004 before becoming a factory driver in sports car racing with Ferrari and Porsche ."),
    ("Zsolt Baumgartner", "Minardi-Cosworth", "Zsolt Baumgartner ( born 1 January 1981 ) is a Hungarian racing driver . He was the first Hungarian to compete in Formula One , driving for Jordan and Minardi ."),
]

CONSTRUCTORS = {
    "Ferrari": ("Scuderia Ferrari", "Scuderia Ferrari is the racing division of the Italian car maker Ferrari . The team is based in Maranello and has competed in every Formula One season since 1950 ."),
    "BAR-Honda": ("British American Racing", "British American Racing ( BAR ) was a Formula One team founded in 1999 . The team was based in Brackley and used Honda engines from 2000 until it was sold to Honda in 2005 ."),
    "Renault": ("Renault F1 Team", "The Renault F1 Team was the works team of the French manufacturer Renault . Its chassis were built at Enstone in Oxfordshire ."),
    "McLaren-Mercedes": ("McLaren", "McLaren Racing is a motor racing team based at the McLaren Technology Centre in Woking . It was founded by Bruce McLaren in 1963 ."),
    "Williams-BMW": ("Williams Grand Prix Engineering", "Williams Grand Prix Engineering is a Formula One team founded by Frank Williams and Patrick Head in 1977 . The team is based in Grove , Oxfordshire ."),
    "Toyota": ("Toyota Racing", "Toyota Racing was the Formula One team of the Japanese manufacturer Toyota . It was run from Cologne in Germany between 2002 and 2009 ."),
    "Jaguar-Cosworth": ("Jaguar Racing", "Jaguar Racing was a British team owned by Ford that raced in Formula One from 2000 to 2004 . It was based in Milton Keynes and was sold to Red Bull at the end of 2004 ."),
    "Sauber-Petronas": ("Sauber", "Sauber is a Swiss motor racing team founded by Peter Sauber in 1970 and based in Hinwil ."),
    "Jordan-Ford": ("Jordan Grand Prix", "Jordan Grand Prix was a Formula One constructor founded by Eddie Jordan in 1991 and based in Silverstone ."),
    "Minardi-Cosworth": ("Minardi", "Minardi was an Italian Formula One team founded by Giancarlo Minardi . It was based in Faenza and competed from 1985 until 2005 ."),
}


def slug(s):
    return s.lower().replace(" ", "_")


def gp_table():
    docs = {}
    rows = []
    base = 70.223
    for i, (driver, cons, bio) in enumerate(DRIVERS):
        d_id = slug(driver)
        docs[d_id] = {"doc_id": d_id, "title": driver.replace(" ", "_"), "text": bio}
        c_title, c_text = CONSTRUCTORS[cons]
        c_id = slug(c_title)
        docs[c_id] = {"doc_id": c_id, "title": c_title.replace(" ", "_"), "text": c_text}
        t = base + 0.17 * i + 0.013 * (i * i % 7)
        time = f"1:{t - 60:06.3f}"
        gap = "" if i == 0 else f"+{t - base:.3f}"
        rows.append([
            {"text": str(i + 1), "linked_doc_ids": []},
            {"text": driver, "linked_doc_ids": [d_id]},
            {"text": cons, "linked_doc_ids": [c_id]},
            {"text": time, "linked_doc_ids": []},
            {"text": gap, "linked_doc_ids": []},
        ])
    table = {
        "table_id": "2004_United_States_Grand_Prix_0",
        "name": "2004 United States Grand Prix",
        "headers": ["Pos", "Driver", "Constructor", "Time", "Gap"],
        "rows": rows,
    }
    return table, docs


GP_QUESTIONS = [
    dict(
        question_id="gp2004-nationality",
        question="The driver who finished in position 4 in the 2004 United States Grand Prix was of what nationality ?",
        answer="British",
        entities=["driver", "position 4", "2004 United States Grand Prix", "nationality"],
        headers=["Pos", "Driver"],
        mapping={"driver": ["Driver"], "position 4": ["Pos"], "2004 United States Grand Prix": ["Others"], "nationality": ["Others"]},
        evidence=["Jenson Button", "British racing driver"],
    ),
    dict(
        question_id="gp2004-birth",
        question="What is the birth date of the driver who qualified in position 7 in the 2004 United States Grand Prix ?",
        answer="30 June 1975",
        entities=["birth date", "driver", "position 7", "2004 United States Grand Prix"],
        headers=["Pos", "Driver"],
        mapping={"birth date": ["Others"], "driver": ["Driver"], "position 7": ["Pos"], "2004 United States Grand Prix": ["Others"]},
        evidence=["Ralf Schumacher", "30 June 1975"],
    ),
    dict(
        question_id="gp2004-brackley",
        question="The constructor of the driver who won the 2009 Formula One World Championship is based in which town ?",
        answer="Brackley",
        entities=["constructor", "driver", "2009 Formula One World Championship", "town"],
        headers=["Driver", "Constructor"],
        mapping={"constructor": ["Constructor"], "driver": ["Driver"], "2009 Formula One World Championship": ["Others"], "town": ["Others"]},
        evidence=["Brackley"],
    ),
    dict(
        question_id="gp2004-toyota",
        question="In which country was the constructor of the driver in position 9 of the 2004 United States Grand Prix based ?",
        answer="Germany",
        entities=["country", "constructor", "driver", "position 9", "2004 United States Grand Prix"],
        headers=["Pos", "Driver", "Constructor"],
        mapping={"country": ["Others"], "constructor": ["Constructor"], "driver": ["Driver"], "position 9": ["Pos"], "2004 United States Grand Prix": ["Others"]},
        evidence=["Cologne in Germany"],
    ),
    dict(
        question_id="gp2004-hungary",
        question="Which driver from Hungary qualified last in the 2004 United States Grand Prix ?",
        answer="Zsolt Baumgartner",
        entities=["driver", "Hungary", "last", "2004 United States Grand Prix"],
        headers=["Pos", "Driver"],
        mapping={"driver": ["Driver"], "Hungary": ["Others"], "last": ["Pos"], "2004 United States Grand Prix": ["Others"]},
        evidence=["Zsolt Baumgartner", "Hungarian"],
    ),
]

# ---------------------------------------------------------------------------
# fictional marathon tables

FIRST = ["Amos", "Brigid", "Caleb", "Dinah", "Elias", "Freya", "Gideon", "Hana", "Idris", "Juno",
         "Kofi", "Lena", "Milo", "Nia", "Oskar", "Priya", "Quinn", "Rosa", "Silas", "Tamsin",
         "Uriel", "Vera", "Wendell", "Ximena"]
LAST = ["Achterberg", "Bellweather", "Cordova", "Dunmore", "Eskildsen", "Farrow", "Galloway",
        "Halvorsen", "Iverson", "Jablonski", "Kettering", "Lindqvist", "Marchetti", "Nakamura",
        "Okonkwo", "Pemberton", "Quarrington", "Rasmussen", "Sandoval", "Thackeray", "Umberfield",
        "Vasquez", "Whitlock", "Yardley"]
NATIONS = [("Kenyan", "Kenya"), ("Norwegian", "Norway"), ("Japanese", "Japan"), ("Moroccan", "Morocco"),
           ("British", "United Kingdom"), ("Dutch", "Netherlands")]
TOWNS = ["Eldoret", "Bergen", "Fukuoka", "Ifrane", "Leeds", "Utrecht", "Iten", "Tromsø", "Sapporo",
         "Fez", "Hexham", "Delft"]
CLUBS = [
    ("Rift Valley Harriers", 1968, "Kipchoge Fields"),
    ("Highland Striders", 1921, "Glenmore Park"),
    ("Northgate Athletic Club", 1894, "Northgate Oval"),
    ("Bayside Running Club", 1977, "Harbourview Track"),
    ("Meridian Track Society", 2003, "Meridian Stadium"),
]
COACHES = ["Ruth Kamau", "Henrik Solberg", "Aiko Mori", "Youssef Benali", "Graham Ashdown", "Pieter de Wit"]
EVENTS = ["Harbour City Marathon", "Lakeside Half Marathon", "Granite Coast 10K", "Pinewood Trail Race",
          "Saltmarsh 25K", "Copperfield Road Mile", "Ember Ridge Ultra", "Tidewater Relay",
          "Aldergrove Cross Country", "Sunhollow Marathon", "Brackenford 15K", "Owlcliff Half Marathon",
          "Marigold Bay 10 Miler", "Stonebridge Fell Race", "Westwind Marathon", "Larkspur Road Race",
          "Frostvale Relay", "Cinderpeak Ultra", "Juniper Lake 20K", "Riverbend Mile",
          "Thornbury Marathon", "Quarry Hill Race", "Silverbirch 5K", "Moorgate Half Marathon"]


def race_tables(rng):
    people = [(f, l) for f, l in zip(FIRST, LAST)]
    rng.shuffle(people)
    tables = []
    events = list(EVENTS)
    rng.shuffle(events)
    specs = [("2011 Riverside Marathon", "Riverside_Marathon_2011"), ("2013 Coastal Classic Marathon", "Coastal_Classic_2013")]
    for t_i, (name, tid) in enumerate(specs):
        docs, rows, athletes = {}, [], []
        for c_name, founded, ground in CLUBS:
            c_id = slug(c_name)
            docs[c_id] = {"doc_id": c_id, "title": c_name.replace(" ", "_"),
                          "text": f"{c_name} is an athletics club founded in {founded} . It trains athletes for road and cross country racing and its home ground is {ground} ."}
        for r in range(12):
            first, last = people[t_i * 12 + r]
            full = f"{first} {last}"
            adj, country = NATIONS[rng.randrange(len(NATIONS))]
            town = TOWNS[rng.randrange(len(TOWNS))]
            club = CLUBS[rng.randrange(len(CLUBS))]
            coach = COACHES[rng.randrange(len(COACHES))]
            event = events[t_i * 12 + r]
            year = 2000 + rng.randrange(11)
            born = f"{rng.randrange(1, 28)} {['March', 'May', 'August', 'October'][rng.randrange(4)]} {1978 + rng.randrange(12)}"
            a_id = slug(full)
            docs[a_id] = {"doc_id": a_id, "title": full.replace(" ", "_"),
                          "text": f"{full} ( born {born} ) is a {adj} long-distance runner from {town} . "
                                  f"{first} trains with the {club[0]} under coach {coach} and won the {event} in {year} ."}
            minutes = 128 + r + rng.randrange(2)
            rows.append([
                {"text": str(r + 1), "linked_doc_ids": []},
                {"text": full, "linked_doc_ids": [a_id]},
                {"text": country, "linked_doc_ids": []},
                {"text": f"2:{minutes - 120:02d}:{rng.randrange(60):02d}", "linked_doc_ids": []},
                {"text": club[0], "linked_doc_ids": [slug(club[0])]},
            ])
            athletes.append(dict(name=full, town=town, club=club, coach=coach, event=event, year=year))
        table = {"table_id": tid, "name": name, "headers": ["Rank", "Athlete", "Country", "Time", "Club"], "rows": rows}
        tables.append((table, docs, athletes))
    return tables


def race_questions(table, athletes, rng, prefix):
    name = table["name"]
    qs = []
    picks = rng.sample(range(12), 5)
    r = picks[0]
    a = athletes[r]
    qs.append(dict(
        question_id=f"{prefix}-town",
        question=f"The athlete who finished in rank {r + 1} of the {name} comes from which town ?",
        answer=a["town"],
        entities=["athlete", f"rank {r + 1}", name, "town"],
        headers=["Rank", "Athlete"],
        mapping={"athlete": ["Athlete"], f"rank {r + 1}": ["Rank"], name: ["Others"], "town": ["Others"]},
        evidence=[a["name"], f"from {a['town']}"],
    ))
    r = picks[1]
    a = athletes[r]
    qs.append(dict(
        question_id=f"{prefix}-coach",
        question=f"Who coaches the runner who placed rank {r + 1} in the {name} ?",
        answer=a["coach"],
        entities=["runner", f"rank {r + 1}", name],
        headers=["Rank", "Athlete"],
        mapping={"runner": ["Athlete"], f"rank {r + 1}": ["Rank"], name: ["Others"]},
        evidence=[a["name"], f"coach {a['coach']}"],
    ))
    r = picks[2]
    a = athletes[r]
    qs.append(dict(
        question_id=f"{prefix}-founded",
        question=f"In which year was the club of the {name} runner who won the {a['year']} {a['event']} founded ?",
        answer=str(a["club"][1]),
        entities=["club", name, "runner", f"{a['year']} {a['event']}"],
        headers=["Athlete", "Club"],
        mapping={"club": ["Club"], name: ["Others"], "runner": ["Athlete"], f"{a['year']} {a['event']}": ["Others"]},
        evidence=[a["event"], f"founded in {a['club'][1]}"],
    ))
    r = picks[3]
    a = athletes[r]
    qs.append(dict(
        question_id=f"{prefix}-ground",
        question=f"What is the home ground of the club of the athlete ranked {r + 1} in the {name} ?",
        answer=a["club"][2],
        entities=["home ground", "club", "athlete", f"ranked {r + 1}", name],
        headers=["Rank", "Athlete", "Club"],
        mapping={"home ground": ["Others"], "club": ["Club"], "athlete": ["Athlete"], f"ranked {r + 1}": ["Rank"], name: ["Others"]},
        evidence=[a["name"], f"home ground is {a['club'][2]}"],
    ))
    r = picks[4]
    a = athletes[r]
    qs.append(dict(
        question_id=f"{prefix}-coachfinish",
        question=f"Which finisher of the {name} is coached by {a['coach']} and won the {a['event']} ?",
        answer=a["name"],
        entities=[name, "finisher", a["coach"], a["event"]],
        headers=["Athlete"],
        mapping={name: ["Others"], "finisher": ["Athlete"], a["coach"]: ["Others"], a["event"]: ["Others"]},
        evidence=[a["name"], a["event"]],
    ))
    return qs


# ---------------------------------------------------------------------------
# fictional film festivals

FILM_WORDS = ["Lantern", "Harbor", "Quiet", "Orchard", "Paper", "Winter", "Cobalt", "Salt", "Hollow",
              "Amber", "Iron", "Meadow", "Glass", "Ember", "Velvet", "Copper", "Fox", "Tide", "Silent", "Marble"]
FILM_NOUNS = ["Season", "Garden", "Crossing", "Letters", "Birds", "Harvest", "Lighthouse", "Road", "Bridge",
              "Choir", "Tenants", "Echoes", "Orchestra", "Kingdom", "Ferry", "Window", "Archive", "Dancers", "Summer", "Mile"]
DIRECTORS = ["Agnes Varela", "Bruno Castellane", "Cecily Ormond", "Dario Lindgren", "Esme Okafor",
             "Felix Drummond", "Greta Solano", "Hector Vane", "Ines Takahara", "Jonah Whitfield",
             "Katya Morel", "Lucien Abara", "Marta Kowal", "Nils Ferreira", "Odile Marsh",
             "Pavel Reyes", "Rhea Calloway", "Stellan Imbert", "Tove Anand", "Umar Halloway"]
CITIES = ["Lisbon", "Montreal", "Kraków", "Osaka", "Lagos", "Valparaíso", "Glasgow", "Tbilisi", "Porto", "Antwerp"]
SCHOOLS = ["Lodz Film School", "La Fémis", "National Film and Television School", "Tisch School of the Arts"]
STUDIOS = [
    ("Northlight Pictures", 1987, "Halifax"),
    ("Blue Heron Films", 1994, "Rotterdam"),
    ("Quarry Lane Studios", 1972, "Manchester"),
    ("Saffron Reel", 2005, "Pune"),
    ("Foxglove Features", 1999, "Wellington"),
]
ACTORS = ["Ada Brannigan", "Bastien Roule", "Clara Mbeki", "Desmond Aalto", "Elin Sorensen", "Farid Nassar",
          "Gwen Talbot", "Hugo Iwasaki", "Isolde Mercer", "Jasper Quill", "Kira Velasco", "Leopold Danvers",
          "Mina Castellanos", "Noor Haddad", "Orla Finnegan", "Piet Vermeulen", "Rosalind Achebe", "Soren Falk",
          "Talia Marquez", "Ulrich Brandt"]


def film_tables(rng):
    titles = [f"The {w} {n}" for w, n in zip(FILM_WORDS, FILM_NOUNS)]
    rng.shuffle(titles)
    directors = list(DIRECTORS)
    rng.shuffle(directors)
    actors = list(ACTORS)
    rng.shuffle(actors)
    out = []
    specs = [("Northvale Film Festival Golden Heron winners", "Northvale_Golden_Heron", "Golden Heron"),
             ("Silverlake Festival Jury Prize winners", "Silverlake_Jury_Prize", "Jury Prize")]
    for t_i, (name, tid, award) in enumerate(specs):
        docs, rows, films = {}, [], []
        for s_name, founded, hq in STUDIOS:
            s_id = slug(s_name)
            docs[s_id] = {"doc_id": s_id, "title": s_name.replace(" ", "_"),
                          "text": f"{s_name} is an independent film studio founded in {founded} and headquartered in {hq} . It produces dramas and documentaries for festival release ."}
        for r in range(10):
            year = 2010 + r
            title = titles[t_i * 10 + r]
            director = directors[t_i * 10 + r]
            actor = actors[t_i * 10 + r]
            studio = STUDIOS[rng.randrange(len(STUDIOS))]
            city = CITIES[rng.randrange(len(CITIES))]
            school = SCHOOLS[rng.randrange(len(SCHOOLS))]
            f_id, d_id = slug(title), slug(director)
            docs[f_id] = {"doc_id": f_id, "title": title.replace(" ", "_"),
                          "text": f"{title} is a {year} drama film directed by {director} and starring {actor} . It was produced by {studio[0]} and runs for {88 + rng.randrange(40)} minutes ."}
            docs[d_id] = {"doc_id": d_id, "title": director.replace(" ", "_"),
                          "text": f"{director} is a film director born in {city} . {director.split()[0]} studied at the {school} and made several short films before a first feature in {year - 3 - rng.randrange(4)} ."}
            rows.append([
                {"text": str(year), "linked_doc_ids": []},
                {"text": title, "linked_doc_ids": [f_id]},
                {"text": director, "linked_doc_ids": [d_id]},
                {"text": studio[0], "linked_doc_ids": [slug(studio[0])]},
            ])
            films.append(dict(year=year, title=title, director=director, actor=actor, studio=studio, city=city))
        table = {"table_id": tid, "name": name, "headers": ["Year", "Film", "Director", "Studio"], "rows": rows}
        out.append((table, docs, films, award))
    return out


def film_questions(table, films, award, rng, prefix):
    name = table["name"]
    picks = rng.sample(range(10), 5)
    qs = []
    f = films[picks[0]]
    qs.append(dict(
        question_id=f"{prefix}-birthcity",
        question=f"The director of the film that won the {award} in {f['year']} was born in which city ?",
        answer=f["city"],
        entities=["director", "film", award, str(f["year"]), "city"],
        headers=["Year", "Film", "Director"],
        mapping={"director": ["Director"], "film": ["Film"], award: ["Others"], str(f["year"]): ["Year"], "city": ["Others"]},
        evidence=[f["director"], f"born in {f['city']}"],
    ))
    f = films[picks[1]]
    qs.append(dict(
        question_id=f"{prefix}-actor",
        question=f"Who starred in the {f['year']} winner of the {award} ?",
        answer=f["actor"],
        entities=[str(f["year"]), "winner", award],
        headers=["Year", "Film"],
        mapping={str(f["year"]): ["Year"], "winner": ["Film"], award: ["Others"]},
        evidence=[f["title"], f"starring {f['actor']}"],
    ))
    f = films[picks[2]]
    qs.append(dict(
        question_id=f"{prefix}-studiofounded",
        question=f"In which year was the studio behind {f['title']} founded ?",
        answer=str(f["studio"][1]),
        entities=["year", "studio", f["title"]],
        headers=["Film", "Studio"],
        mapping={"year": ["Others"], "studio": ["Studio"], f["title"]: ["Film"]},
        evidence=[f["title"], f"founded in {f['studio'][1]}"],
    ))
    f = films[picks[3]]
    qs.append(dict(
        question_id=f"{prefix}-studiohq",
        question=f"Where is the studio headquartered that produced the {award} winner starring {f['actor']} ?",
        answer=f["studio"][2],
        entities=["studio", award, "winner", f["actor"]],
        headers=["Film", "Studio"],
        mapping={"studio": ["Studio"], award: ["Others"], "winner": ["Film"], f["actor"]: ["Others"]},
        evidence=[f["actor"], f"headquartered in {f['studio'][2]}"],
    ))
    f = films[-1]
    qs.append(dict(
        question_id=f"{prefix}-latest",
        question=f"Who directed the most recent film to win the {award} ?",
        answer=f["director"],
        entities=["directed", "most recent film", award],
        headers=["Year", "Film", "Director"],
        mapping={"directed": ["Director"], "most recent film": ["Film"], award: ["Others"]},
        evidence=[f["title"], f["director"], str(f["year"])],
    ))
    return qs


def instance(q, table, docs):
    return {
        "question_id": q["question_id"],
        "question": q["question"],
        "table": table,
        "documents": docs,
        "gold_answers": [q["answer"]],
    }


def script(q):
    return {k: q[k] for k in ("question", "answer", "entities", "headers", "mapping", "evidence")}


def main():
    rng = random.Random(20240615)
    OUT.mkdir(parents=True, exist_ok=True)
    gp, gp_docs = gp_table()
    instances, scripts = [], {}
    for q in GP_QUESTIONS:
        instances.append(instance(q, gp, gp_docs))
        scripts[q["question_id"]] = script(q)
    for i, (table, docs, athletes) in enumerate(race_tables(rng)):
        for q in race_questions(table, athletes, rng, f"race{i + 1}"):
            instances.append(instance(q, table, docs))
            scripts[q["question_id"]] = script(q)
    for i, (table, docs, films, award) in enumerate(film_tables(rng)):
        for q in film_questions(table, films, award, rng, f"film{i + 1}"):
            instances.append(instance(q, table, docs))
            scripts[q["question_id"]] = script(q)
    assert len(instances) == 25, len(instances)

    def write_jsonl(path, recs):
        with open(path, "w", encoding="utf-8") as f:
            for rec in recs:
                f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    write_jsonl(OUT / "gp2004.jsonl", instances[:1])
    write_jsonl(OUT / "sample25.jsonl", instances)
    (OUT / "scripts.json").write_text(json.dumps(scripts, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(instances)} instances to {OUT}")


if __name__ == "__main__":
    main()

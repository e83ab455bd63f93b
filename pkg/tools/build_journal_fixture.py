"""Regenerate the journal mock-site fixtures (Drupal and WordPress flavours).

    python tools/build_journal_fixture.py
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "cmsbridge" / "mock" / "fixtures"

# logical entity -> (drupal raw name, wordpress route name, wordpress taxonomy?)
RAW = {
    "video": ("node--video_article", "video_article", False),
    "news": ("node--news_article", "news_article", False),
    "podcast": ("node--podcast", "podcast", False),
    "ads": ("block_content--banner_ads", "banner_ads", False),
    "age": ("taxonomy_term--age_rating", "age_rating", True),
    "tag": ("taxonomy_term--tag", "tags", False),
    "vfile": ("media--video", "media", False),
    "image": ("media--image", None, False),
    "audio": ("media--audio", None, False),
    "user": ("user--user", "users", False),
    "comment": ("comment--comment", "comments", False),
}

SCHEMA = {
    "video": (
        [("title", "Text"), ("summary", "Text"), ("likes", "Integer"),
         ("durationSeconds", "Float"), ("published", "DateTime"), ("featured", "Boolean")],
        [("video", "vfile", "One"), ("ageRating", "age", "One"), ("tags", "tag", "Many"),
         ("relatedArticles", "news", "Many"), ("author", "user", "One"),
         ("comments", "comment", "Many")],
    ),
    "news": (
        [("title", "Text"), ("body", "Text"), ("likes", "Integer"), ("published", "DateTime")],
        [("bannerAds", "ads", "Many"), ("relatedVideos", "video", "Many"),
         ("images", "image", "Many"), ("author", "user", "One"), ("tags", "tag", "Many")],
    ),
    "podcast": (
        [("title", "Text"), ("likes", "Integer"), ("durationMinutes", "Float"),
         ("published", "DateTime")],
        [("audio", "audio", "One"), ("author", "user", "One")],
    ),
    "ads": ([("title", "Text"), ("advertiser", "Text"), ("targetUrl", "Text"),
             ("active", "Boolean")], []),
    "age": ([("name", "Text"), ("minimumAge", "Integer")], []),
    "tag": ([("name", "Text")], []),
    "vfile": ([("name", "Text"), ("url", "Text")], []),
    "image": ([("name", "Text"), ("url", "Text")], []),
    "audio": ([("name", "Text"), ("url", "Text")], []),
    "user": ([("name", "Text"), ("displayName", "Text")], []),
    "comment": ([("body", "Text")], [("author", "user", "One"), ("parent", "comment", "One")]),
}

TITLES_VIDEO = ["Election night recap", "Storm hits the coast", "Inside the new metro line",
                "Championship final highlights", "Interview with the mayor", "Tech fair 2021"]
TITLES_NEWS = ["Election results by district", "How the storm formed", "Metro line opens",
               "Final score and reactions", "Mayor outlines budget", "Startups at the tech fair",
               "Weather outlook for the week", "Transit fares to rise", "Local team news"]
LIKES_VIDEO = [154, 87, 230, 412, 12, 99]
LIKES_NEWS = [45, 130, 8, 260, 77, 101, 3, 150, 64]


def records():
    out = []

    def add(kind, rid, attrs, rels=None, day=1):
        out.append({"kind": kind, "id": rid, "attributes": attrs,
                    "relationships": rels or {}, "lastUpdated": f"2021-03-{day:02d}T09:00:00Z"})

    for i, (name, display) in enumerate([("ada", "Ada Reporter"), ("bo", "Bo Editor"),
                                         ("cy", "Cy Anchor")], 1):
        add("user", f"u{i}", {"name": name, "displayName": display})
    for i, (name, age) in enumerate([("all-ages", 0), ("teen", 13), ("adult", 18)], 1):
        add("age", f"ar{i}", {"name": name, "minimumAge": age})
    for i, name in enumerate(["politics", "weather", "sports", "city"], 1):
        add("tag", f"t{i}", {"name": name})
    for i in range(1, 7):
        add("vfile", f"mv{i}", {"name": f"video-{i}.mp4", "url": f"https://cdn.example.com/v/{i}.mp4"})
    for i in range(1, 5):
        add("image", f"mi{i}", {"name": f"image-{i}.jpg", "url": f"https://cdn.example.com/i/{i}.jpg"})
    for i in range(1, 4):
        add("audio", f"ma{i}", {"name": f"episode-{i}.mp3", "url": f"https://cdn.example.com/a/{i}.mp3"})
    for i, (title, advertiser) in enumerate([("Spring sale", "Acme"), ("New phone", "Phonico"),
                                             ("Fly south", "AirTravel")], 1):
        add("ads", f"b{i}", {"title": title, "advertiser": advertiser,
                             "targetUrl": f"https://ads.example.com/{i}", "active": i != 3})
    comments = [("c1", "Great coverage", "u2", None), ("c2", "Agreed", "u3", "c1"),
                ("c3", "Where is part two?", "u1", None), ("c4", "Coming soon", "u2", "c3")]
    for rid, body, author, parent in comments:
        add("comment", rid, {"body": body}, {"author": author, "parent": parent})
    related = {1: ["n1", "n5"], 2: ["n2", "n7"], 3: ["n3", "n8"], 4: ["n4", "n9"], 5: ["n5"],
               6: ["n6"]}
    for i, title in enumerate(TITLES_VIDEO, 1):
        add("video", f"v{i}", {
            "title": title,
            "summary": f"Video report: {title.lower()}",
            "likes": LIKES_VIDEO[i - 1],
            "durationSeconds": 60.5 * i,
            "published": f"2021-02-{i + 10:02d}T18:30:00Z",
            "featured": i % 2 == 1,
        }, {
            "video": f"mv{i}", "ageRating": f"ar{(i % 3) + 1}",
            "tags": [f"t{(i % 4) + 1}"], "relatedArticles": related[i],
            "author": f"u{(i % 3) + 1}",
            "comments": ["c1", "c2"] if i == 1 else (["c3", "c4"] if i == 2 else []),
        }, day=i)
    for i, title in enumerate(TITLES_NEWS, 1):
        add("news", f"n{i}", {
            "title": title,
            "body": f"Full story: {title}.",
            "likes": LIKES_NEWS[i - 1],
            "published": f"2021-02-{i + 9:02d}T07:15:00Z",
        }, {
            "bannerAds": [f"b{(i % 3) + 1}"],
            "relatedVideos": [f"v{i}"] if i <= 6 else [],
            "images": [f"mi{(i % 4) + 1}"],
            "author": f"u{(i % 3) + 1}",
            "tags": [f"t{(i % 4) + 1}"],
        }, day=i)
    for i, title in enumerate(["Morning briefing", "City talk", "Sports weekly"], 1):
        add("podcast", f"p{i}", {"title": title, "likes": 20 * i, "durationMinutes": 25.0 + i,
                                 "published": f"2021-02-0{i}T06:00:00Z"},
            {"audio": f"ma{i}", "author": f"u{i}"}, day=i)
    return out


def build(platform):
    index = 0 if platform == "Drupal" else 1
    raw = {k: v[index] for k, v in RAW.items()}
    if platform == "WordPress":
        # WordPress keeps every media item under /wp/v2/media
        raw["image"] = raw["audio"] = "media"
    schema, seen = [], set()
    for kind, (attrs, rels) in SCHEMA.items():
        name = raw[kind]
        if name in seen:
            continue
        seen.add(name)
        schema.append({
            "rawTypeName": name,
            "taxonomy": platform == "WordPress" and RAW[kind][2],
            "attributes": [{"name": n, "type": t} for n, t in attrs],
            "relationships": [{"name": n, "target": raw[target], "multiplicity": m}
                              for n, target, m in rels],
        })
    content = [
        {"id": r["id"], "type": raw[r["kind"]], "lastUpdated": r["lastUpdated"],
         "attributes": r["attributes"], "relationships": r["relationships"]}
        for r in records()
    ]
    return {
        "version": "mocksite/1",
        "siteName": "Journal CMS",
        "platform": platform,
        "host": "journal.example.com",
        "basePath": "/jsonapi" if platform == "Drupal" else "/wp-json",
        "auth": None,
        "schema": schema,
        "content": content,
    }


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for platform, filename in (("Drupal", "journal.json"), ("WordPress", "journal_wordpress.json")):
        path = OUT / filename
        path.write_text(json.dumps(build(platform), indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")

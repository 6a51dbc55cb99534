"""Synthetic stand-ins for the four source corpora.

The real corpora are not redistributed. These generators write files in the
same layouts as the real ones (see :mod:`aradhati.ingest`), with news-style
vocabulary for objective text and opinion vocabulary for subjective text,
plus the noise real files carry (URLs, hashtags, Latin, emoji, diacritics,
tatweel). Output depends only on the seed.
"""

from __future__ import annotations

import random
from pathlib import Path

STOP = "في من على عن الى ان هذا هذه مع كان لا ما هو هي و قد ثم".split()

NEWS = {
    "Medical": (
        "وزارة الصحة أعلنت مستشفى الأطباء المرضى العلاج اللقاح الفيروس الدواء "
        "الدراسة الباحثون المركز الطبي العملية الجراحية حالات الإصابة الوقاية الأمراض "
        "المزمنة الفحص المختبر التطعيم الصحية الدولية"
    ).split(),
    "Sports": (
        "المنتخب المباراة الدوري الفريق اللاعب المدرب البطولة النادي الملعب الهدف "
        "الشوط الثاني التأهل النهائي الاتحاد الموسم الجولة المركز الفوز التعادل "
        "الحكم الجماهير الكأس"
    ).split(),
    "Technology": (
        "شركة أطلقت هاتف تطبيق الإلكتروني الإنترنت البيانات المستخدمين التقنية "
        "الأجهزة البرمجيات الشبكة الذكي الحاسوب النسخة العربية موقعها الرقمية "
        "الخدمة المعالج الشاشة التحديث الأمن"
    ).split(),
    "Politics": "الحكومة البرلمان الوزير الانتخابات الحزب الرئيس المجلس القرار الدولة الاجتماع".split(),
    "Finance": "البنك الأسهم السوق الاستثمار الأرباح الميزانية البورصة العملة التضخم الشركات".split(),
    "Culture": "المهرجان المعرض الفنان المسرح الكتاب الثقافة التراث الفيلم الموسيقى الجائزة".split(),
    "Religion": "المسجد الصلاة الحج الزكاة الفتوى العلماء الدعوة رمضان الشريعة الأوقاف".split(),
}
NEWS_GLUE = "أعلن أكد أشار صرح أفاد ذكر خلال يوم أمس اليوم العام الماضي بحسب تقرير رسمي بيان".split()

BOOK = (
    "رواية الكاتب القصة الكتاب الأسلوب الشخصيات النهاية الصفحات الأحداث السرد "
    "الفصول المؤلف الحبكة القارئ"
).split()
HOTEL = (
    "الفندق الغرفة الموظفين الإفطار الموقع المسبح السرير الحمام الاستقبال النظافة "
    "الخدمة الإقامة الإطلالة المطعم"
).split()
POSITIVE = (
    "رائعة جميل ممتاز أعجبتني أنصح مذهلة ممتعة أحببت رائع مريح نظيفة لطيف "
    "مبدع جدا الأفضل سعيد"
).split()
NEGATIVE = (
    "سيء ممل فاشل مخيب كرهت أسوأ مزعج قذرة رديء ضعيف للأسف مقرف متعب غالي "
    "خسارة بطيء"
).split()
FEEL = "أحب أكره أتمنى أشعر أعتقد أظن والله بصراحة يا ليت حقا".split()
TWEET_TOPIC = "الناس البلد الحياة الشعب الدنيا الوضع اليوم الليلة الجو الصباح".split()
TWEET_NEWS = "عاجل مصدر الشرطة القاهرة الرياض وكالة الأنباء المؤتمر الصحفي انطلاق فعاليات".split()

DIACRITICS = "ًَُِّْ"
NOISE = [
    "http://t.co/{a}", "https://www.example.com/{a}", "www.news{a}.com", "#{w}", "@user{a}",
    "!!", "...", "؟", "،", "😀", "❤", "2024", "٢٠٢٤", "ok", "lol", "(", ")", "-",
]


class _Writer:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def pick(self, seq, k):
        return [self.rng.choice(seq) for _ in range(k)]

    def decorate(self, words, noise_rate):
        out = []
        for w in words:
            r = self.rng.random()
            if r < 0.03:
                w = w[:1] + "ــ" + w[1:]
            elif r < 0.06:
                w = "".join(ch + (self.rng.choice(DIACRITICS) if self.rng.random() < 0.5 else "") for ch in w)
            out.append(w)
            if self.rng.random() < noise_rate:
                n = self.rng.choice(NOISE)
                out.append(n.format(a=self.rng.randint(1, 999), w=self.rng.choice(["news", "sport", "خبر"])))
        return " ".join(out)

    def sentence(self, content, glue, length, noise_rate):
        words = []
        for _ in range(length):
            r = self.rng.random()
            if r < 0.25:
                words.append(self.rng.choice(STOP))
            elif r < 0.4 and glue:
                words.append(self.rng.choice(glue))
            else:
                words.append(self.rng.choice(content))
        return self.decorate(words, noise_rate)

    def article(self, category):
        return self.sentence(NEWS[category], NEWS_GLUE, self.rng.randint(12, 40), 0.05)

    def review(self, topic, polarity):
        if polarity > 0:
            mood = POSITIVE
        elif polarity < 0:
            mood = NEGATIVE
        else:
            mood = POSITIVE + NEGATIVE
        return self.sentence(topic + mood + mood, FEEL, self.rng.randint(5, 25), 0.05)

    def tweet(self, tag):
        if tag == "OBJ":
            return self.sentence(TWEET_NEWS + NEWS["Politics"], NEWS_GLUE, self.rng.randint(4, 18), 0.25)
        mood = {"POS": POSITIVE, "NEG": NEGATIVE, "NEUTRAL": POSITIVE + NEGATIVE}[tag]
        return self.sentence(TWEET_TOPIC + mood + FEEL, FEEL, self.rng.randint(3, 18), 0.25)


def write_astd(path, n_obj, n_pos, n_neg, n_mixed, seed=0, bad_rows=0):
    w = _Writer(seed)
    tags = ["OBJ"] * n_obj + ["POS"] * n_pos + ["NEG"] * n_neg + ["NEUTRAL"] * n_mixed
    w.rng.shuffle(tags)
    lines = [f"{w.tweet(t)}\t{t}" for t in tags]
    for _ in range(bad_rows):
        lines.insert(w.rng.randint(0, len(lines)), f"{w.tweet('POS')}\tUNKNOWN")
    _write(path, lines)
    return len(lines)


def write_labr(path, n, seed=1, bad_rows=0):
    w = _Writer(seed)
    lines = []
    for i in range(n):
        rating = w.rng.randint(1, 5)
        text = w.review(BOOK, (rating > 3) - (rating < 3))
        lines.append(f"{rating}\t{i}\t{w.rng.randint(1, 9999)}\t{w.rng.randint(1, 999)}\t{text}")
    for _ in range(bad_rows):
        lines.insert(w.rng.randint(0, len(lines)), f"9\t0\t0\t0\t{w.review(BOOK, 1)}")
    _write(path, lines)
    return len(lines)


def write_hard(path, n, seed=2, bad_rows=0):
    w = _Writer(seed)
    lines = ["no\tHotel name\trating\tuser type\troom type\tnights\treview"]
    for i in range(n):
        rating = w.rng.choice([1, 2, 4, 5])
        text = w.review(HOTEL, 1 if rating > 3 else -1)
        lines.append(f"{i}\tفندق {i % 50}\t{rating}\tعائلة\tغرفة مزدوجة\t{w.rng.randint(1, 7)}\t{text}")
    for _ in range(bad_rows):
        lines.insert(w.rng.randint(1, len(lines)), f"0\tx\t3\tx\tx\t1\t{w.review(HOTEL, 0)}")
    _write(path, lines)
    return len(lines) - 1


def write_sanad(path, per_category, seed=3, categories=("Medical", "Sports", "Technology")):
    """``per_category`` is an int or a mapping category -> count."""
    w = _Writer(seed)
    if isinstance(per_category, int):
        per_category = {c: per_category for c in categories}
    rows = [(c, w.article(c)) for c, k in per_category.items() for _ in range(k)]
    w.rng.shuffle(rows)
    _write(path, ["category\ttext"] + [f"{c}\t{t}" for c, t in rows])
    return len(rows)


def write_sources(directory, scale="small", seed=0):
    """Write all four source files into ``directory``; return their paths.

    ``scale="small"`` gives a few hundred rows per corpus (seconds to build);
    ``scale="full"`` uses the source sizes behind the reference split table
    (ASTD 3,315 subjective / 6,691 objective).
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {name: d / f"{name.lower()}.tsv" for name in ("ASTD", "LABR", "HARD", "SANAD")}
    if scale == "full":
        write_astd(paths["ASTD"], 6691, 799, 1684, 832, seed=seed)
        write_labr(paths["LABR"], 17000, seed=seed + 1)
        write_hard(paths["HARD"], 17000, seed=seed + 2)
        write_sanad(paths["SANAD"], 11000, seed=seed + 3)
    elif scale == "small":
        write_astd(paths["ASTD"], 120, 20, 25, 15, seed=seed, bad_rows=2)
        write_labr(paths["LABR"], 80, seed=seed + 1, bad_rows=1)
        write_hard(paths["HARD"], 80, seed=seed + 2, bad_rows=1)
        write_sanad(paths["SANAD"], {"Medical": 40, "Sports": 40, "Technology": 40, "Culture": 10}, seed=seed + 3)
    else:
        raise ValueError(f"unknown scale {scale!r}")
    return paths


def learning_fixture(n=2000, seed=0):
    """Balanced (text, label) pairs: news articles (0) against reviews (1)."""
    w = _Writer(seed)
    cats = ("Medical", "Sports", "Technology")
    items = []
    for i in range(n // 2):
        items.append((w.article(cats[i % 3]), 0))
        topic = BOOK if i % 2 else HOTEL
        items.append((w.review(topic, w.rng.choice([-1, 1])), 1))
    w.rng.shuffle(items)
    return items


def _write(path, lines):
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

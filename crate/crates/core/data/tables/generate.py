#!/usr/bin/env python3
"""Regenerate the bundled romanization tables.

Alphabetic scripts are listed by hand. Indic consonants, vowels and vowel
signs are derived from their Unicode character names, with every
consonant+sign pair emitted as a two-codepoint key so the inherent vowel is
replaced rather than appended.

Usage: python3 generate.py  (writes *.tsv next to this file)
"""

import os
import re
import unicodedata

HERE = os.path.dirname(os.path.abspath(__file__))
EMPTY = "∅"


def write(name, script, entries, notes=()):
    seen = {}
    for key, val in entries:
        key = unicodedata.normalize("NFD", key)
        if key in seen:
            if seen[key] != val:
                raise SystemExit(f"{name}: conflicting entries for {key!r}")
            continue
        if not re.fullmatch(r"[a-z0-9']*", val):
            raise SystemExit(f"{name}: bad replacement {val!r} for {key!r}")
        if not 1 <= len(key) <= 4:
            raise SystemExit(f"{name}: key {key!r} has {len(key)} codepoints")
        seen[key] = val
    path = os.path.join(HERE, f"{name}.tsv")
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# script: {script}\n")
        for n in notes:
            f.write(f"# {n}\n")
        for key, val in seen.items():
            f.write(f"{key}\t{val if val else EMPTY}\n")


def digits(zero):
    return [(chr(zero + i), str(i)) for i in range(10)]


def cyrillic():
    base = {
        "а": "a", "б": "b", "в": "v", "г": "g", "д": "d", "е": "e", "ж": "zh",
        "з": "z", "и": "i", "й": "y", "к": "k", "л": "l", "м": "m", "н": "n",
        "о": "o", "п": "p", "р": "r", "с": "s", "т": "t", "у": "u", "ф": "f",
        "х": "kh", "ц": "ts", "ч": "ch", "ш": "sh", "щ": "shch", "ъ": "",
        "ы": "y", "ь": "", "э": "e", "ю": "yu", "я": "ya", "ё": "e",
        # Ukrainian, Belarusian, Serbian, Macedonian
        "і": "i", "ї": "yi", "є": "ye", "ґ": "g", "ў": "u", "ђ": "dj",
        "ј": "j", "љ": "lj", "њ": "nj", "ћ": "c", "џ": "dz", "ѓ": "gj",
        "ќ": "kj", "ѕ": "dz", "ѐ": "e", "ѝ": "i",
    }
    entries = list(base.items())
    # Names borrowed from Latin-script languages usually render c before a
    # back vowel as к (carl, colorado, cuba).
    entries += [("ка", "ca"), ("ко", "co"), ("ку", "cu")]
    write("cyrillic", "Cyrillic", entries,
          ["к before а/о/у is romanized as c to favour Latin-script name spellings"])


def greek():
    base = {
        "α": "a", "β": "b", "γ": "g", "δ": "d", "ε": "e", "ζ": "z", "η": "i",
        "θ": "th", "ι": "i", "κ": "k", "λ": "l", "μ": "m", "ν": "n", "ξ": "x",
        "ο": "o", "π": "p", "ρ": "r", "σ": "s", "ς": "s", "τ": "t", "υ": "y",
        "φ": "f", "χ": "ch", "ψ": "ps", "ω": "o",
        # archaic letters still present in Wikipedia text
        "ϝ": "w", "ϙ": "q", "ϛ": "st", "ϡ": "ss", "ϳ": "j",
    }
    entries = list(base.items()) + [("ου", "ou")]
    write("greek", "Greek", entries)


def hebrew():
    base = {
        "א": "a", "ב": "b", "ג": "g", "ד": "d", "ה": "h", "ו": "v", "ז": "z",
        "ח": "kh", "ט": "t", "י": "y", "ך": "k", "כ": "k", "ל": "l", "ם": "m",
        "מ": "m", "ן": "n", "נ": "n", "ס": "s", "ע": "'", "ף": "f", "פ": "p",
        "ץ": "ts", "צ": "ts", "ק": "q", "ר": "r", "ש": "sh", "ת": "t",
        "װ": "v", "ױ": "oy", "ײ": "ey", "׳": "'", "״": "",
    }
    write("hebrew", "Hebrew", list(base.items()),
          ["points (niqqud) have no entries and are dropped: no vocalization"])


def arabic():
    base = {
        "ء": "'", "ا": "a", "ب": "b", "ت": "t", "ث": "th", "ج": "j", "ح": "h",
        "خ": "kh", "د": "d", "ذ": "dh", "ر": "r", "ز": "z", "س": "s", "ش": "sh",
        "ص": "s", "ض": "d", "ط": "t", "ظ": "z", "ع": "'", "غ": "gh", "ف": "f",
        "ق": "q", "ك": "k", "ل": "l", "م": "m", "ن": "n", "ه": "h", "و": "w",
        "ي": "y", "ى": "a", "ة": "h", "ـ": "",
        # Persian and Urdu letters
        "پ": "p", "چ": "ch", "ژ": "zh", "گ": "g", "ک": "k", "ی": "y",
        "ٹ": "t", "ڈ": "d", "ڑ": "r", "ں": "n", "ھ": "h", "ہ": "h", "ے": "e",
        "ۀ": "h", "ۃ": "h",
        # hamza seats decompose to seat + hamza mark; the mark is a separate key
        "ٔ": "'", "ٕ": "'", "ٓ": "",
    }
    entries = list(base.items()) + digits(0x0660) + digits(0x06F0)
    write("arabic", "Arabic", entries,
          ["short-vowel marks have no entries and are dropped: no vocalization"])


VOWEL_NAMES = {
    "A": "a", "AA": "aa", "I": "i", "II": "ii", "U": "u", "UU": "uu",
    "VOCALIC R": "ri", "VOCALIC RR": "rii", "VOCALIC L": "li", "VOCALIC LL": "lii",
    "E": "e", "EE": "ee", "AI": "ai", "O": "o", "OO": "oo", "AU": "au",
    "CANDRA E": "e", "CANDRA O": "o", "SHORT E": "e", "SHORT O": "o",
    "SHORT A": "a", "CANDRA A": "a", "OE": "oe", "OOE": "ooe", "AW": "aw",
    "UE": "ue", "UUE": "uue", "CANDRA LONG E": "e", "PRISHTHAMATRA E": "e",
}

SPECIAL_LETTERS = {
    "GLOTTAL STOP": "'", "VEDIC ANUSVARA": "n",
}


def consonant_value(tail):
    # qualifiers come first (MARWARI DDA, KHANDA TA) or after WITH
    tail = tail.split(" WITH ")[0].split()[-1].lower()
    # Unicode names spell the consonant with its inherent vowel.
    if tail.endswith("a"):
        return tail[:-1]
    return tail


def indic(name, script, block_start, extra=()):
    prefix = script.upper() + " "
    consonants, vowels, signs = {}, {}, {}
    virama = nukta = None
    marks = {}
    for cp in range(block_start, block_start + 0x80):
        ch = chr(cp)
        try:
            uname = unicodedata.name(ch)
        except ValueError:
            continue
        if not uname.startswith(prefix):
            continue
        rest = uname[len(prefix):]
        if rest.startswith("LETTER "):
            if unicodedata.decomposition(ch):
                # precomposed nukta letters decompose under NFD
                continue
            tail = rest[len("LETTER "):]
            if tail in SPECIAL_LETTERS:
                vowels[ch] = SPECIAL_LETTERS[tail]
            elif tail in VOWEL_NAMES:
                vowels[ch] = VOWEL_NAMES[tail]
            elif tail.startswith("VOCALIC"):
                continue
            else:
                consonants[ch] = consonant_value(tail)
        elif rest.startswith("VOWEL SIGN "):
            tail = rest[len("VOWEL SIGN "):]
            if tail in VOWEL_NAMES:
                signs[ch] = VOWEL_NAMES[tail]
        elif rest in ("SIGN VIRAMA",):
            virama = ch
        elif rest == "SIGN NUKTA":
            nukta = ch
        elif rest in ("SIGN ANUSVARA",):
            marks[ch] = "n"
        elif rest in ("SIGN CANDRABINDU",):
            marks[ch] = "n"
        elif rest in ("SIGN VISARGA",):
            marks[ch] = "h"
        elif rest.startswith("AU LENGTH MARK") or rest.startswith("AI LENGTH MARK"):
            marks[ch] = ""
    entries = []
    for c, v in consonants.items():
        entries.append((c, v + "a"))
        for s, sv in signs.items():
            entries.append((c + s, v + sv))
        if virama:
            entries.append((c + virama, v))
        if nukta:
            entries.append((c + nukta, v + "a"))
            for s, sv in signs.items():
                entries.append((c + nukta + s, v + sv))
            if virama:
                entries.append((c + nukta + virama, v))
    entries += list(vowels.items())
    entries += list(signs.items())
    entries += list(marks.items())
    if virama:
        entries.append((virama, ""))
    if nukta:
        entries.append((nukta, ""))
    entries += list(extra)
    # nukta + split vowel signs can exceed the key limit; those fall back to
    # shorter matches
    entries = [(k, v) for k, v in entries
               if len(unicodedata.normalize("NFD", k)) <= 4]
    digit_zero = None
    for cp in range(block_start, block_start + 0x80):
        try:
            if unicodedata.name(chr(cp)) == prefix + "DIGIT ZERO":
                digit_zero = cp
        except ValueError:
            pass
    if digit_zero:
        entries += digits(digit_zero)
    write(name, script, entries,
          ["derived from Unicode character names; consonant+sign pairs replace the inherent vowel"])


def thai():
    cons = {}
    for cp in range(0x0E01, 0x0E2F):
        uname = unicodedata.name(chr(cp))
        first = uname[len("THAI CHARACTER "):].split()[0]
        if first in ("RU", "LU"):
            cons[chr(cp)] = first.lower()
            continue
        val = first.lower()
        if val.endswith("o"):
            val = val[:-1]
        cons[chr(cp)] = val
    vowels = {
        "ะ": "a", "ั": "a", "า": "a", "ำ": "am", "ิ": "i", "ี": "i", "ึ": "ue",
        "ื": "ue", "ุ": "u", "ู": "u", "ฺ": "", "เ": "e", "แ": "ae", "โ": "o",
        "ใ": "ai", "ไ": "ai", "ๅ": "", "ๆ": "", "็": "", "่": "", "้": "",
        "๊": "", "๋": "", "์": "", "ํ": "", "๎": "", "ฯ": "",
    }
    entries = list(cons.items()) + list(vowels.items()) + digits(0x0E50)
    write("thai", "Thai", entries)


def hangul():
    initials = ["g", "kk", "n", "d", "tt", "r", "m", "b", "pp", "s", "ss", "",
                "j", "jj", "ch", "k", "t", "p", "h"]
    medials = ["a", "ae", "ya", "yae", "eo", "e", "yeo", "ye", "o", "wa", "wae",
               "oe", "yo", "u", "wo", "we", "wi", "yu", "eu", "ui", "i"]
    finals = ["k", "k", "k", "n", "n", "n", "t", "l", "k", "m", "l", "l", "l",
              "p", "l", "m", "p", "p", "t", "t", "ng", "t", "t", "k", "t", "p", "t"]
    entries = []
    entries += [(chr(0x1100 + i), v) for i, v in enumerate(initials)]
    entries += [(chr(0x1161 + i), v) for i, v in enumerate(medials)]
    entries += [(chr(0x11A8 + i), v) for i, v in enumerate(finals)]
    # compatibility jamo, written standalone
    compat_cons = {
        "ㄱ": "g", "ㄲ": "kk", "ㄳ": "ks", "ㄴ": "n", "ㄵ": "nj", "ㄶ": "nh",
        "ㄷ": "d", "ㄸ": "tt", "ㄹ": "r", "ㄺ": "lg", "ㄻ": "lm", "ㄼ": "lb",
        "ㄽ": "ls", "ㄾ": "lt", "ㄿ": "lp", "ㅀ": "lh", "ㅁ": "m", "ㅂ": "b",
        "ㅃ": "pp", "ㅄ": "bs", "ㅅ": "s", "ㅆ": "ss", "ㅇ": "ng", "ㅈ": "j",
        "ㅉ": "jj", "ㅊ": "ch", "ㅋ": "k", "ㅌ": "t", "ㅍ": "p", "ㅎ": "h",
    }
    entries += list(compat_cons.items())
    entries += [(chr(0x314F + i), v) for i, v in enumerate(medials)]
    write("hangul", "Hangul", entries,
          ["syllables are decomposed to conjoining jamo before lookup"])


def kana():
    hira = {
        "あ": "a", "い": "i", "う": "u", "え": "e", "お": "o",
        "か": "ka", "き": "ki", "く": "ku", "け": "ke", "こ": "ko",
        "さ": "sa", "し": "shi", "す": "su", "せ": "se", "そ": "so",
        "た": "ta", "ち": "chi", "つ": "tsu", "て": "te", "と": "to",
        "な": "na", "に": "ni", "ぬ": "nu", "ね": "ne", "の": "no",
        "は": "ha", "ひ": "hi", "ふ": "fu", "へ": "he", "ほ": "ho",
        "ま": "ma", "み": "mi", "む": "mu", "め": "me", "も": "mo",
        "や": "ya", "ゆ": "yu", "よ": "yo",
        "ら": "ra", "り": "ri", "る": "ru", "れ": "re", "ろ": "ro",
        "わ": "wa", "ゐ": "i", "ゑ": "e", "を": "o", "ん": "n",
        "が": "ga", "ぎ": "gi", "ぐ": "gu", "げ": "ge", "ご": "go",
        "ざ": "za", "じ": "ji", "ず": "zu", "ぜ": "ze", "ぞ": "zo",
        "だ": "da", "ぢ": "ji", "づ": "zu", "で": "de", "ど": "do",
        "ば": "ba", "び": "bi", "ぶ": "bu", "べ": "be", "ぼ": "bo",
        "ぱ": "pa", "ぴ": "pi", "ぷ": "pu", "ぺ": "pe", "ぽ": "po",
        "ぁ": "a", "ぃ": "i", "ぅ": "u", "ぇ": "e", "ぉ": "o",
        "ゃ": "ya", "ゅ": "yu", "ょ": "yo", "っ": "", "ゔ": "vu",
    }
    entries = []
    for h, v in hira.items():
        entries.append((h, v))
        entries.append((chr(ord(h) + 0x60), v))
    yoon_base = {"き": "k", "し": "sh", "ち": "ch", "に": "n", "ひ": "h",
                 "み": "m", "り": "r", "ぎ": "g", "じ": "j", "び": "b", "ぴ": "p"}
    for b, c in yoon_base.items():
        for small, vv in (("ゃ", "a"), ("ゅ", "u"), ("ょ", "o")):
            y = "" if c in ("sh", "ch", "j") else "y"
            val = c + y + vv
            entries.append((b + small, val))
            entries.append((chr(ord(b) + 0x60) + chr(ord(small) + 0x60), val))
    entries += [("ー", ""), ("・", ""), ("ヴ", "vu"),
                ("゙", ""), ("゚", "")]
    write("kana", "Hiragana Katakana", entries,
          ["voiced kana decompose under NFD; the two-codepoint keys cover them"])


def main():
    cyrillic()
    greek()
    hebrew()
    arabic()
    indic("devanagari", "Devanagari", 0x0900)
    indic("bengali", "Bengali", 0x0980)
    indic("tamil", "Tamil", 0x0B80)
    indic("kannada", "Kannada", 0x0C80)
    thai()
    hangul()
    kana()


if __name__ == "__main__":
    main()

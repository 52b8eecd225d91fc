"""Builds tests/data/es_normalize.tsv: sentence<TAB>expected placeholder text.

Each sentence is a template with typed slots; the expected column is the same
template with every slot replaced by its kind name, so expectations do not
depend on the normalizer under test.
"""
import random
from pathlib import Path

FILLS = {
    "DATE": ["5 de marzo de 2018", "12/07/2019", "1-1-2020", "2021-11-30",
             "31 de diciembre de 1999", "3 de  septiembre de 2004", "7/10/2015"],
    "LOC": ["Madrid", "Buenos Aires", "Bruselas", "San Sebastián", "Ciudad de México"],
    "ORG": ["Comisión Europea", "Banco Central Europeo", "Naciones Unidas", "Grupo 20",
            "Parlamento Europeo"],
    "PER": ["María José García", "Juan Pérez", "Ana Belén"],
    "NUM": ["1.234,56", "25", "3,5", "100", "7", "2.000", "48.500.000"],
}

TEMPLATES = [
    "El {DATE} la {ORG} publicó el informe en {LOC}.",
    "{PER} llegó a {LOC} el {DATE}.",
    "La reunión costó {NUM} euros y duró {NUM} horas.",
    "Según la {ORG}, el {DATE} se vendieron {NUM} unidades.",
    "El artículo {NUM} del reglamento entra en vigor el {DATE}.",
    "{PER} y {PER} firmaron el acuerdo en {LOC}.",
    "El {ORG} fijó el tipo en {NUM} por ciento.",
    "Desde {LOC} se enviaron {NUM} toneladas antes del {DATE}.",
    "La decisión del {DATE} afecta a {NUM} Estados miembros.",
    "Sin cifras ni fechas en esta frase.",
    "El anexo {NUM} se modificó el {DATE} en {LOC}.",
    "{ORG} y {ORG} colaboran desde el {DATE}.",
]


def main():
    rng = random.Random(2024)
    rows = []
    for i in range(50):
        t = TEMPLATES[i % len(TEMPLATES)]
        sentence, expected = "", ""
        pos = 0
        while True:
            start = t.find("{", pos)
            if start < 0:
                sentence += t[pos:]
                expected += t[pos:]
                break
            end = t.index("}", start)
            kind = t[start + 1:end]
            sentence += t[pos:start] + rng.choice(FILLS[kind])
            expected += t[pos:start] + kind
            pos = end + 1
        rows.append(f"{sentence}\t{expected}\n")
    out = Path(__file__).resolve().parent.parent / "data" / "es_normalize.tsv"
    out.write_text("".join(rows), encoding="utf-8")

    gaz = Path(__file__).resolve().parent.parent / "data" / "gazetteer.tsv"
    lines = ["# surface<TAB>kind\n"]
    for kind in ("LOC", "ORG", "PER"):
        for s in FILLS[kind]:
            lines.append(f"{s}\t{kind}\n")
    # Shorter entries that the longest-match rule must not prefer.
    lines += ["Banco\tORG\n", "Buenos\tLOC\n", "María\tPER\n", "Ciudad\tLOC\n"]
    gaz.write_text("".join(lines), encoding="utf-8")


if __name__ == "__main__":
    main()

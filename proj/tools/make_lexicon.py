#!/usr/bin/env python3
"""Writes data/grammar.cfg and data/lexicon.tsv.

The grammar drives `morphgen synthesize-corpus`; the lexicon holds every
grammar form plus extra tenses, clitic pronouns, punctuation and a few
words used by the tests.
"""
import argparse
import pathlib

NOUNS_M = """
libro informe documento proyecto acuerdo programa problema sistema tema derecho
período gobierno país consejo comité grupo estado mundo pueblo plan proceso
texto artículo capítulo párrafo mensaje contrato presupuesto resultado objetivo
objeto ojo hijo hilo hierro hielo hombre hotel horno oro edificio camino coche
barco tren puerto mercado precio producto servicio centro banco museo teatro
parque jardín río mar lago puente campo bosque árbol animal perro gato caballo
pájaro pez médico maestro alumno ministro director secretario presidente
ciudadano vecino amigo trabajador productor cliente juez abogado soldado
ejército debate diálogo conflicto tratado reglamento sector desarrollo
crecimiento cambio aumento análisis virus sobre lunes martes tiempo año mes día
momento siglo caso ejemplo número punto nivel orden tipo modo medio uso
papel color sonido viaje vuelo trabajo empleo sueldo impuesto gasto ingreso
fondo recurso material equipo método modelo estudio examen ensayo idioma
órgano hospital colegio instituto ideal interés invierno verano otoño
miércoles jueves viernes cumpleaños paraguas rascacielos paréntesis énfasis
oasis campus
"""

NOUNS_F = """
cuestión sesión casa mesa silla puerta ventana ciudad calle plaza escuela
universidad iglesia isla idea imagen industria obra oficina oferta hoja hora
orden organización opinión operación oportunidad obligación empresa economía
política ley norma regla propuesta decisión resolución declaración conferencia
reunión comisión asamblea nación región zona frontera tierra agua montaña playa
costa selva flor planta fruta carne leche comida bebida cena fiesta música
canción película novela historia noticia carta revista página palabra frase
lengua voz mujer niña madre hija hermana amiga profesora doctora ministra
directora secretaria persona familia sociedad comunidad población mayoría
minoría crisis tesis hipótesis dosis síntesis caries situación condición relación
información educación salud seguridad libertad igualdad justicia paz guerra
violencia pobreza riqueza energía luz red máquina herramienta fábrica tienda
cuenta factura deuda crédito cantidad calidad medida parte forma manera vez
semana tarde noche mañana clase prueba respuesta pregunta razón causa
"""

ADJ_O = """
nuevo viejo bueno malo alto bajo largo corto blanco negro rojo amarillo
rico pobre lleno vacío abierto cerrado claro oscuro limpio sucio rápido lento
moderno antiguo público privado político económico social nacional internacional
humano relativo europeo americano italiano ibérico ilustre inmenso íntimo
oficial oscuro orgulloso honesto hermoso histórico científico técnico práctico
necesario propio único último primero segundo tercero general particular
correcto directo distinto diverso extranjero famoso gracioso breve
"""
ADJ_C = """
grande importante interesante verde fuerte débil alegre triste enorme
inteligente increíble inmóvil difícil fácil útil inútil igual azul gris joven
mayor menor mejor peor regular popular militar central total normal legal
ilegal industrial oral original
"""

VERBS_AR = """
hablar comprar trabajar preparar presentar examinar analizar apoyar aceptar
observar organizar publicar revisar mejorar visitar esperar necesitar ayudar
cambiar comentar considerar crear diseñar dibujar escuchar firmar ganar guardar
lavar llamar llevar mirar nadar olvidar pagar pintar preguntar regresar reparar
respetar saludar tomar usar votar terminar anunciar celebrar controlar declarar
financiar gestionar impulsar informar investigar limpiar negociar ocupar
participar reformar rechazar reclamar registrar representar solicitar superar
transformar ignorar importar iniciar imaginar ilustrar ordenar ocultar opinar
"""
VERBS_ER = """
comer beber aprender comprender vender temer correr responder prometer deber
meter barrer esconder sorprender proteger
"""
VERBS_IR = """
decidir vivir recibir subir permitir cumplir discutir dividir existir insistir
ocurrir partir resistir unir añadir admitir asistir compartir definir
interrumpir invadir omitir persuadir suprimir sufrir confundir
"""

INTRANSITIVE = {"nadar", "regresar", "existir", "ocurrir", "partir", "correr", "vivir",
                "insistir", "opinar", "participar", "trabajar", "sufrir"}

PREPOSITIONS = "en con sobre para sin entre hacia desde por contra".split()
# prepositions that take an infinitive complement
PREP_INF = "para sin por".split()
# unstressed final -es / -as nouns with one form for both numbers
INVARIANT_ES = {"lunes", "martes", "miércoles", "jueves", "viernes", "cumpleaños", "paraguas",
                "rascacielos", "caries"}
NUMERALS = "dos tres cuatro cinco seis siete ocho diez veinte cien".split()

STRIP = str.maketrans("áéíóú", "aeiou")
ACCENT = {"a": "á", "e": "é", "i": "í", "o": "ó", "u": "ú"}
IRREGULAR_PLURAL = {"imagen": "imágenes", "examen": "exámenes", "orden": "órdenes",
                    "joven": "jóvenes", "crimen": "crímenes", "origen": "orígenes"}


def words(block):
    seen, out = set(), []
    for w in block.split():
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def invariant(noun):
    return noun.endswith(("is", "us")) or noun in INVARIANT_ES


def plural(w):
    if w in IRREGULAR_PLURAL:
        return IRREGULAR_PLURAL[w]
    if w[-1] in "aeiouáéó":
        return w + "s"
    if w.endswith("z"):
        return w[:-1] + "ces"
    if w[-2:] in ("ón", "án", "én", "ín", "ún", "és", "ás", "ís", "ós", "ús") or (
            len(w) > 2 and w[-2] in "áéíóú" and w[-1] in "nsl"):
        # the accent is only needed on the singular
        return w[:-2] + w[-2].translate(STRIP) + w[-1] + "es"
    if w[-1] == "í":
        return w + "es"
    return w + "es"


def noun_forms(lemma, gender):
    if invariant(lemma):
        return [(f"NC{gender}N000", lemma)]
    return [(f"NC{gender}S000", lemma), (f"NC{gender}P000", plural(lemma))]


def adj_forms(lemma, common):
    if common:
        return [("AQ0CS0", lemma), ("AQ0CP0", plural(lemma))]
    stem = lemma[:-1]
    if lemma.endswith("ero") and lemma in ("primero", "tercero"):
        pass
    return [("AQ0MS0", lemma), ("AQ0FS0", stem + "a"), ("AQ0MP0", stem + "os"), ("AQ0FP0", stem + "as")]


def before_e(stem):
    # spelling change before e for -ar verbs
    if stem.endswith("c"):
        return stem[:-1] + "qu"
    if stem.endswith("g"):
        return stem + "u"
    if stem.endswith("z"):
        return stem[:-1] + "c"
    return stem


def before_ao(stem):
    # proteger -> protej-a, protej-o
    if stem.endswith("g"):
        return stem[:-1] + "j"
    return stem


def verb_forms(inf):
    stem, kind = inf[:-2], inf[-2:]
    f = {"VMN0000": inf}
    if kind == "ar":
        f.update({"VMIP3S0": stem + "a", "VMIP3P0": stem + "an", "VMIP1S0": stem + "o",
                  "VMIS3S0": stem + "ó", "VMIS3P0": stem + "aron",
                  "VMII3S0": stem + "aba", "VMII3P0": stem + "aban",
                  "VMSP3S0": before_e(stem) + "e", "VMSP3P0": before_e(stem) + "en",
                  "VMG0000": stem + "ando"})
        part = stem + "ad"
    else:
        pres = "e" if kind in ("er", "ir") else "e"
        f.update({"VMIP3S0": stem + pres, "VMIP3P0": stem + pres + "n", "VMIP1S0": before_ao(stem) + "o",
                  "VMIS3S0": stem + "ió", "VMIS3P0": stem + "ieron",
                  "VMII3S0": stem + "ía", "VMII3P0": stem + "ían",
                  "VMSP3S0": before_ao(stem) + "a", "VMSP3P0": before_ao(stem) + "an",
                  "VMG0000": stem + "iendo"})
        part = stem + "id"
    f.update({"VMIF3S0": inf + "á", "VMIF3P0": inf + "án",
              "VMIC3S0": inf + "ía", "VMIC3P0": inf + "ían",
              "VMP00SM": part + "o", "VMP00SF": part + "a", "VMP00PM": part + "os", "VMP00PF": part + "as"})
    return sorted(f.items())


FINITE = ("VMIP3S0", "VMIP3P0", "VMIS3S0", "VMIS3P0", "VMIF3S0", "VMIF3P0", "VMII3S0", "VMII3P0")
PARTICIPLE = ("VMP00SM", "VMP00SF", "VMP00PM", "VMP00PF")

GRAMMAR_HEAD = """\
# Agreement grammar for the synthetic corpus. Written by tools/make_lexicon.py.
#
# Symbols with {x} share gender and number with every other {x} in the rule.
# Variables that appear only on the right-hand side are drawn from [priors].
# @S / @P restrict a rule to singular / plural bindings.
#
# Plural noun phrases nearly always carry a number cue (a numeral, `varios`,
# or a bare plural with no determiner). `DEF N` plurals are kept rare, so a
# small share of number labels cannot be recovered from the window.

[priors]
gender M 0.5
gender F 0.5
number S 0.6
number P 0.4

[rules]
S -> CLAUSE PUNCT : 8
S -> CLAUSE CONJ CLAUSE PUNCT : 2
CLAUSE -> NP{x} VP{x} : 10
CLAUSE -> NP{x} VP{x} PP : 3
VP{x} -> VI{x} : 2
VP{x} -> VT{x} NP{y} : 6
VP{x} -> VT{x} NP{y} CONJ OBJ{z} : 1
VP{x} -> VT{x} INF NP{y} : 1.5
VP{x} -> ESTAR{x} GER NP{y} : 1.5
VP{x} -> SER{x} PART{x} : 2
VP{x} -> SER{x} ADJP{x} : 2
VP{x} -> ESTAR{x} ADJ{x} : 1
PP -> PREP NP{z} : 1
PP -> PREPINF INF NP{z} : 0.5
OBJ{x} @P -> NBAR{x} : 1
OBJ{x} -> NP{x} : 1
NP{x} @S -> DEF{x} NBAR{x} : 6
NP{x} @S -> INDEF{x} NBAR{x} : 3
NP{x} @S -> CADA{x} NBAR{x} : 1
NP{x} @P -> NUM NBAR{x} : 4
NP{x} @P -> DEF{x} NUM NBAR{x} : 2
NP{x} @P -> VARIOS{x} NBAR{x} : 3
NP{x} @P -> DEF{x} NBAR{x} : 0.45
NBAR{x} -> N{x} : 5
NBAR{x} -> N{x} ADJP{x} : 4
ADJP{x} -> ADJ{x} : 6
ADJP{x} -> ADJ{x} CONJ ADJ{x} : 1

[lexicon]
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)

    lex = []          # (class, lemma, [(tag, surface)])
    extra = []        # lexicon-only (surface, lemma, tag)

    for n in words(NOUNS_M):
        lex.append(("N", n, noun_forms(n, "M")))
    for n in words(NOUNS_F):
        lex.append(("N", n, noun_forms(n, "F")))
    for a in words(ADJ_O):
        lex.append(("ADJ", a, adj_forms(a, False)))
    for a in words(ADJ_C):
        lex.append(("ADJ", a, adj_forms(a, True)))

    verbs = [(v, "ar") for v in words(VERBS_AR)] + [(v, "er") for v in words(VERBS_ER)] + \
            [(v, "ir") for v in words(VERBS_IR)]
    for v, _ in verbs:
        forms = verb_forms(v)
        finite = [(t, s) for t, s in forms if t in FINITE]
        lex.append(("VI" if v in INTRANSITIVE else "VT", v, finite))
        lex.append(("PART", v, [(t, s) for t, s in forms if t in PARTICIPLE]))
        lex.append(("INF", v, [("VMN0000", v)]))
        lex.append(("GER", v, [(t, s) for t, s in forms if t == "VMG0000"]))
        extra.extend((s, v, t) for t, s in forms)

    lex.append(("SER", "ser", [("VSIP3S0", "es"), ("VSIP3P0", "son"), ("VSIS3S0", "fue"),
                               ("VSIS3P0", "fueron"), ("VSII3S0", "era"), ("VSII3P0", "eran")]))
    lex.append(("ESTAR", "estar", [("VAIP3S0", "está"), ("VAIP3P0", "están")]))
    lex.append(("DEF", "el", [("DA0MS0", "el"), ("DA0FS0", "la"), ("DA0MP0", "los"), ("DA0FP0", "las")]))
    lex.append(("INDEF", "uno", [("DI0MS0", "un"), ("DI0FS0", "una")]))
    lex.append(("CADA", "cada", [("DI0CS0", "cada")]))
    lex.append(("VARIOS", "varios", [("DI0MP0", "varios"), ("DI0FP0", "varias")]))
    for num in NUMERALS:
        lex.append(("NUM", num, [("DN0CP0", num)]))
    for p in PREPOSITIONS:
        lex.append(("PREP", p, [("SPS00", p)]))
    for p in PREP_INF:
        lex.append(("PREPINF", p, [("SPS00", p)]))
    lex.append(("CONJ", "y", [("CC", "y")]))
    lex.append(("CONJ", "o", [("CC", "o")]))
    lex.append(("PUNCT", ".", [("Fp", ".")]))

    # Words outside the grammar.
    extra += [("de", "de", "SPS00"), ("a", "a", "SPS00"), ("``", "``", "Fp"), ("''", "''", "Fp"),
              (",", ",", "Fc"), ("titulado", "titular", "AQ0MS0"), ("titulada", "titular", "AQ0FS0"),
              ("titulados", "titular", "AQ0MP0"), ("tituladas", "titular", "AQ0FP0")]
    for s, t in [("me", "PP1CS00"), ("te", "PP2CS00"), ("se", "PP3CN00"), ("le", "PP3CS00"),
                 ("les", "PP3CP00"), ("lo", "PP3MS00"), ("la", "PP3FS00"), ("los", "PP3MP00"),
                 ("las", "PP3FP00"), ("nos", "PP1CP00"), ("os", "PP2CP00")]:
        extra.append((s, s, t))

    grammar = [GRAMMAR_HEAD]
    for cls, lemma, forms in lex:
        grammar.append(f"{cls} {lemma} " + " ".join(f"{t}={s}" for t, s in forms) + "\n")
    (out / "grammar.cfg").write_text("".join(grammar), encoding="utf-8")

    entries = {}
    for cls, lemma, forms in lex:
        for t, s in forms:
            entries[(lemma, t)] = s
    for s, lemma, t in extra:
        prev = entries.setdefault((lemma, t), s)
        assert prev == s, (lemma, t, prev, s)
    lines = ["# surface\tlemma\ttag  (written by tools/make_lexicon.py)\n"]
    for (lemma, t), s in sorted(entries.items()):
        lines.append(f"{s}\t{lemma}\t{t}\n")
    (out / "lexicon.tsv").write_text("".join(lines), encoding="utf-8")
    print(f"{len(lex)} grammar entries, {len(entries)} lexicon forms")


if __name__ == "__main__":
    main()

"""Bundled public-suffix snapshot for registrable-domain labeling.

Only multi-label suffixes need listing: a host whose last label matches no
entry falls back to the standard "*" rule (the top-level label itself is
the suffix), which covers every plain TLD.  This is a trimmed snapshot of
the common registry-level second-level suffixes, not the full list.
"""
from __future__ import annotations

__all__ = ["MULTI_LABEL_SUFFIXES"]

MULTI_LABEL_SUFFIXES = frozenset({
    # United Kingdom
    "co.uk", "org.uk", "me.uk", "ltd.uk", "plc.uk", "net.uk", "sch.uk",
    "ac.uk", "gov.uk", "nhs.uk", "police.uk",
    # Australia / New Zealand
    "com.au", "net.au", "org.au", "edu.au", "gov.au", "asn.au", "id.au",
    "co.nz", "net.nz", "org.nz", "govt.nz", "ac.nz", "school.nz", "geek.nz",
    # Japan / Korea / China / Taiwan / Hong Kong / Singapore
    "co.jp", "ne.jp", "or.jp", "go.jp", "ac.jp", "ad.jp", "ed.jp", "gr.jp", "lg.jp",
    "co.kr", "ne.kr", "or.kr", "re.kr", "go.kr", "ac.kr", "pe.kr",
    "com.cn", "net.cn", "org.cn", "gov.cn", "edu.cn", "ac.cn",
    "com.tw", "net.tw", "org.tw", "edu.tw", "gov.tw", "idv.tw",
    "com.hk", "net.hk", "org.hk", "edu.hk", "gov.hk", "idv.hk",
    "com.sg", "net.sg", "org.sg", "edu.sg", "gov.sg", "per.sg",
    # India and neighbours
    "co.in", "net.in", "org.in", "firm.in", "gen.in", "ind.in", "nic.in",
    "ac.in", "edu.in", "res.in", "gov.in", "mil.in",
    "com.pk", "net.pk", "org.pk", "edu.pk", "gov.pk",
    "com.bd", "net.bd", "org.bd", "edu.bd", "gov.bd",
    "com.lk", "org.lk", "edu.lk", "gov.lk",
    "com.np", "org.np", "edu.np", "gov.np",
    # Americas
    "com.br", "net.br", "org.br", "gov.br", "edu.br", "art.br", "blog.br",
    "com.mx", "net.mx", "org.mx", "edu.mx", "gob.mx",
    "com.ar", "net.ar", "org.ar", "edu.ar", "gob.ar",
    "com.co", "net.co", "org.co", "edu.co", "gov.co",
    "com.pe", "net.pe", "org.pe", "edu.pe", "gob.pe",
    "com.ve", "net.ve", "org.ve", "co.ve", "gob.ve",
    "com.cl", "gob.cl", "gov.cl",
    "com.ec", "net.ec", "org.ec", "edu.ec", "gob.ec",
    "com.uy", "net.uy", "org.uy", "edu.uy", "gub.uy",
    "com.bo", "net.bo", "org.bo", "edu.bo", "gob.bo",
    "com.py", "net.py", "org.py", "edu.py", "gov.py",
    "com.do", "net.do", "org.do", "edu.do", "gob.do",
    "com.gt", "net.gt", "org.gt", "edu.gt", "gob.gt",
    "com.sv", "org.sv", "edu.sv", "gob.sv",
    "com.ni", "org.ni", "edu.ni", "gob.ni",
    "com.pa", "net.pa", "org.pa", "edu.pa", "gob.pa",
    "co.cr", "or.cr", "ed.cr", "go.cr",
    "qc.ca", "on.ca", "bc.ca", "ab.ca", "mb.ca", "sk.ca", "ns.ca", "nb.ca",
    # Europe
    "co.at", "or.at", "ac.at", "gv.at",
    "com.pl", "net.pl", "org.pl", "edu.pl", "gov.pl", "waw.pl",
    "com.ro", "org.ro", "nt.ro", "tm.ro",
    "com.ru", "net.ru", "org.ru", "msk.ru", "spb.ru",
    "com.ua", "net.ua", "org.ua", "edu.ua", "gov.ua", "kiev.ua",
    "com.gr", "net.gr", "org.gr", "edu.gr", "gov.gr",
    "com.pt", "net.pt", "org.pt", "edu.pt", "gov.pt",
    "com.es", "nom.es", "org.es", "gob.es", "edu.es",
    "co.hu", "org.hu", "info.hu",
    "com.tr", "net.tr", "org.tr", "edu.tr", "gov.tr", "gen.tr", "web.tr",
    "co.il", "net.il", "org.il", "ac.il", "gov.il", "muni.il",
    "com.cy", "org.cy", "net.cy",
    "com.mt", "org.mt", "net.mt", "edu.mt",
    "com.is", "net.is", "org.is",
    "co.no", "priv.no",
    # Africa / Middle East
    "co.za", "net.za", "org.za", "web.za", "gov.za", "ac.za", "edu.za",
    "com.ng", "net.ng", "org.ng", "edu.ng", "gov.ng",
    "co.ke", "or.ke", "ne.ke", "go.ke", "ac.ke",
    "com.gh", "org.gh", "edu.gh", "gov.gh",
    "com.eg", "net.eg", "org.eg", "edu.eg", "gov.eg",
    "co.ma", "net.ma", "org.ma", "ac.ma", "gov.ma",
    "com.tn", "org.tn", "net.tn",
    "com.sa", "net.sa", "org.sa", "edu.sa", "gov.sa", "med.sa",
    "com.ae", "net.ae", "org.ae", "ac.ae", "gov.ae",
    "com.qa", "net.qa", "org.qa", "edu.qa", "gov.qa",
    "com.kw", "net.kw", "org.kw", "edu.kw",
    "com.bh", "net.bh", "org.bh",
    "com.om", "net.om", "org.om",
    "com.jo", "net.jo", "org.jo", "edu.jo", "gov.jo",
    "com.lb", "net.lb", "org.lb", "edu.lb", "gov.lb",
    # Other common multi-label registries
    "com.ph", "net.ph", "org.ph", "edu.ph", "gov.ph",
    "com.my", "net.my", "org.my", "edu.my", "gov.my",
    "co.id", "or.id", "web.id", "ac.id", "sch.id", "go.id", "my.id",
    "com.vn", "net.vn", "org.vn", "edu.vn", "gov.vn",
    "co.th", "in.th", "or.th", "ac.th", "go.th",
    "com.kh", "net.kh", "org.kh", "edu.kh", "gov.kh",
    "com.mm", "net.mm", "org.mm",
    "com.bn", "net.bn", "org.bn",
    "com.fj", "org.fj", "ac.fj",
    "com.pg", "net.pg", "org.pg",
    "co.ck", "org.ck", "edu.ck", "gov.ck",
    # Generic second-level hosting suffixes common in crawls
    "blogspot.com", "appspot.com", "github.io", "gitlab.io", "herokuapp.com",
    "wordpress.com", "tumblr.com", "netlify.app", "vercel.app", "web.app",
    "firebaseapp.com", "azurewebsites.net", "cloudfront.net", "fastly.net",
    "amazonaws.com", "pages.dev", "neocities.org", "weebly.com", "wixsite.com",
})

"""Reference 25-node nested rule for Beta(1/2, 1/2) on [0, 1].

Each node is listed with the first level it belongs to. The nodes are
(1 - cos(k*pi/24)) / 2 for k = 0..24, which gives an independent check.
"""

ARCSINE_NODES = [
    ("0", 3),
    ("0.0042775693130947944277212365357185643611308627759489", 5),
    ("0.017037086855465856625128400135551316183047580495798", 4),
    ("0.038060233744356621935908405301605856588791687068179", 5),
    ("0.066987298107780676618138414623531908264298686547405", 2),
    ("0.10332332985438241771011151924935036168566203947404", 5),
    ("0.14644660940672623779957781894757548035758203115576", 4),
    ("0.19561928549563968029195122855091799774180314401876", 5),
    ("0.25", 3),
    ("0.30865828381745511413577000798480056661932771875719", 5),
    ("0.37059047744873961882555058118797583582546554934003", 4),
    ("0.43473690388997420422579688605225549490312964759413", 5),
    ("0.5", 1),
    ("0.56526309611002579577420311394774450509687035240587", 5),
    ("0.62940952255126038117444941881202416417453445065997", 4),
    ("0.69134171618254488586422999201519943338067228124281", 5),
    ("0.75", 3),
    ("0.80438071450436031970804877144908200225819685598124", 5),
    ("0.85355339059327376220042218105242451964241796884424", 4),
    ("0.89667667014561758228988848075064963831433796052596", 5),
    ("0.93301270189221932338186158537646809173570131345260", 2),
    ("0.96193976625564337806409159469839414341120831293182", 5),
    ("0.98296291314453414337487159986444868381695241950420", 4),
    ("0.99572243068690520557227876346428143563886913722405", 5),
    ("1", 3),
]

ARCSINE_SCHEDULE = [1, 2, 4, 6, 12]

# factor added at each level of that rule, coefficients in ascending degree
ARCSINE_FACTORS = [
    ["-1/2", "1"],
    ["1/16", "-1", "1"],
    ["0", "-3/16", "19/16", "-2", "1"],
    ["1/2048", "-9/256", "105/256", "-7/4", "27/8", "-3", "1"],
    ["1/8388608", "-9/262144", "429/262144", "-1001/32768", "19305/65536", "-429/256",
     "1547/256", "-459/32", "2907/128", "-95/4", "63/4", "-6", "1"],
]
